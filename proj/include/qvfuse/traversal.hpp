#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qvfuse/index.hpp"
#include "qvfuse/topk.hpp"

namespace qvfuse {

/// A bag-of-words query with a positive integer multiplier per term. Terms
/// are unique and kept in lexicographic order so that score accumulation
/// visits contributions in one canonical order on every execution path.
struct weighted_query {
    std::vector<std::pair<std::string, std::uint32_t>> terms;

    static weighted_query from_terms(const std::vector<std::string>& terms);
};

struct traversal_stats {
    std::uint64_t postings_scored = 0;
    std::chrono::nanoseconds elapsed{0};
    std::chrono::nanoseconds cpu{0};
    bool cpu_is_wall = false;  // set when the platform lacks a thread CPU clock

    traversal_stats& operator+=(const traversal_stats& other) {
        postings_scored += other.postings_scored;
        elapsed += other.elapsed;
        cpu += other.cpu;
        cpu_is_wall = cpu_is_wall || other.cpu_is_wall;
        return *this;
    }
};

enum class strategy { exhaustive, maxscore, wand, bmw };

strategy strategy_from_name(std::string_view name);
std::string_view strategy_name(strategy s);

struct traversal_result {
    ranked_list top;
    traversal_stats stats;
};

/// Reference evaluation: scores every document containing at least one query
/// term. The pruned strategies are required to reproduce its top-k exactly.
traversal_result daat_exhaustive(const inverted_index& index, const weighted_query& query,
                                 std::size_t k);

traversal_result daat_maxscore(const inverted_index& index, const weighted_query& query,
                               std::size_t k);

traversal_result daat_wand(const inverted_index& index, const weighted_query& query,
                           std::size_t k);

traversal_result daat_bmw(const inverted_index& index, const weighted_query& query,
                          std::size_t k);

traversal_result daat(const inverted_index& index, const weighted_query& query, std::size_t k,
                      strategy s);

}  // namespace qvfuse
