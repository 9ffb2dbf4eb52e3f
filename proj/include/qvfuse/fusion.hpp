#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qvfuse/index.hpp"
#include "qvfuse/rng.hpp"
#include "qvfuse/traversal.hpp"

namespace qvfuse {

/// A cluster of query variations for one topic. Variations are stored as
/// normalized term sequences; repeated entries represent duplicate variations
/// and carry weight in the fusion (each occurrence counts once toward n_t).
struct query_variation_set {
    std::string topic;
    std::vector<std::vector<std::string>> variations;
};

/// Union of the variations' terms, with each term weighted by the number of
/// variations containing it. Repetition of a term inside one variation does
/// not increase its weight; a variation is treated as a term set.
weighted_query build_super_query(const query_variation_set& vs);

/// CombSUM over ranked lists: score(d) = sum of d's scores across the lists,
/// with absent treated as zero. Output covers every distinct document, sorted
/// by (score desc, internal id asc). When `normalize` is set each input list
/// is min-max rescaled to [0,1] first (a constant-score list maps to all
/// ones); the unnormalized form is the one that matches super-query scoring.
ranked_list combsum(std::span<const ranked_list> lists, bool normalize = false);

/// CombSUM with a positive weight per list (used to give a shared heap the
/// multiplicity of its duplicate variations).
ranked_list combsum_weighted(std::span<const ranked_list> lists, std::span<const double> weights,
                             bool normalize = false);

/// Evaluate the whole variation set as one super query. By score additivity
/// this equals the untruncated CombSUM of the per-variation rankings while
/// traversing the index once; upper bounds are scaled by n_t on the fly, so
/// any safe-to-k strategy may be used.
traversal_result sp_cs(const inverted_index& index, const query_variation_set& vs, std::size_t k,
                       strategy s = strategy::maxscore);

/// One pass over the union of postings cursors, feeding a separate top-k heap
/// per unique variation. Duplicate variations share a heap; `multiplicity`
/// records how many occurrences each heap stands for.
struct sp_exhaustive_result {
    std::vector<ranked_list> per_variation;  // one per unique variation
    std::vector<std::uint32_t> multiplicity;
    traversal_stats stats;
};

sp_exhaustive_result sp_exhaustive(const inverted_index& index, const query_variation_set& vs,
                                   std::size_t k);

/// Fuse the per-variation heaps of sp_exhaustive into the final list.
ranked_list fuse_variation_lists(const sp_exhaustive_result& lists);

/// Parallel fusion: evaluate each unique variation independently on a bounded
/// worker pool and CombSUM the results. Output is identical to serial
/// execution; stats sum across workers, while elapsed time is the slowest
/// worker plus the fusion step.
struct pf_result {
    ranked_list fused;
    traversal_stats stats;
};

pf_result pf(const inverted_index& index, const query_variation_set& vs, std::size_t k,
             std::size_t worker_budget, strategy s = strategy::exhaustive);

/// Draw m variations with replacement; deterministic for a given seed.
query_variation_set sample_variants(const query_variation_set& vs, std::size_t m,
                                    std::uint64_t seed);

/// Unique variations (compared as term sets) with their multiplicities, in
/// first-appearance order.
struct unique_variations {
    std::vector<std::vector<std::string>> term_sets;  // sorted unique terms
    std::vector<std::uint32_t> multiplicity;
};

unique_variations dedupe_variations(const query_variation_set& vs);

}  // namespace qvfuse
