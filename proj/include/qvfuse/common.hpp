#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qvfuse {

using doc_id_t = std::uint32_t;
using term_id_t = std::uint32_t;

inline constexpr const char* kVersion = "1.0.0";

/// Raised when an input file or argument violates a documented contract.
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when an operation is invoked with an unusable configuration
/// (e.g. block-max traversal without block metadata).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qvfuse
