#pragma once

#include <cstdint>
#include <random>

namespace qvfuse {

// All randomness in the project flows from a single 64-bit seed through this
// generator. Bounded draws use Lemire's multiply-shift reduction instead of
// std::uniform_int_distribution, whose output is implementation-defined.
class rng {
  public:
    explicit rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform draw from [0, bound). bound must be > 0.
    std::uint64_t bounded(std::uint64_t bound) {
        // 128-bit multiply-shift; bias is negligible for the bounds used here
        // and the result is identical on every platform.
        const unsigned __int128 m =
            static_cast<unsigned __int128>(gen_()) * static_cast<unsigned __int128>(bound);
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1).
    double unit() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Derive an independent stream, e.g. one per trial or per worker.
    rng fork(std::uint64_t stream) {
        return rng(gen_() ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace qvfuse
