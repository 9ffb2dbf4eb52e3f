#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qvfuse/fusion.hpp"
#include "qvfuse/run_io.hpp"

namespace qvfuse {

inline constexpr std::size_t kCentroidDepth = 1000;

/// A precomputed fused ranking for one query cluster, held to a depth of
/// 1,000 documents, with constant-time membership and rank lookup.
struct centroid_entry {
    std::string cluster_id;
    run ranking;
    std::unordered_map<std::string, std::size_t> rank_of;  // docid -> 0-based rank

    static centroid_entry from_run(std::string cluster_id, run ranking,
                                   std::size_t depth = kCentroidDepth);

    bool contains(const std::string& doc) const { return rank_of.count(doc) > 0; }
};

/// Frozen centroid cache: built offline, concurrent read-only lookups online.
class centroid_store {
  public:
    void add(centroid_entry entry);
    const centroid_entry* find(const std::string& cluster_id) const;
    const std::vector<centroid_entry>& entries() const { return entries_; }

    /// Packed text layout: `cluster <id> <depth>` then one document per line.
    /// The rank-only variant omits scores (enough for rank-based boosting)
    /// and is strictly smaller on disk.
    void save(const std::filesystem::path& file, bool rank_only = false) const;
    static centroid_store load(const std::filesystem::path& file);

  private:
    std::vector<centroid_entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Offline centroid construction: evaluate the cluster's super query to the
/// centroid depth and keep the fused ranking.
centroid_entry build_centroid(const inverted_index& index, const query_variation_set& vs,
                              std::size_t depth = kCentroidDepth,
                              strategy s = strategy::maxscore);

/// Multi-run construction: CombSUM over externally supplied ranked lists
/// (e.g. several systems over several variations), truncated to depth.
centroid_entry build_centroid_multirun(std::string cluster_id, const std::vector<run>& lists,
                                       std::size_t depth = kCentroidDepth);

/// One pseudo-document per cluster: the deduplicated union of the cluster's
/// query terms, so repeated terms cannot bias cluster selection.
std::vector<std::string> pseudo_doc_terms(const query_variation_set& vs);
inverted_index build_pseudo_index(const std::vector<query_variation_set>& clusters,
                                  const bm25_params& params = {});

struct cluster_match {
    std::optional<std::string> cluster_id;  // empty when no term is shared
    double score = 0.0;
};

/// Top BM25 pseudo-document for the query; ties break toward the cluster
/// ingested first. min_score, when positive, rejects weak matches.
cluster_match match_cluster(const std::vector<std::string>& query_terms,
                            const inverted_index& pseudo_index, double min_score = 0.0);

// --- boosting --------------------------------------------------------------
//
// All boosting operations are pure functions of their inputs, emit
// duplicate-free rankings of at most k documents, and never look at the
// inverted index. Interleave and ref_reorder are rank-based, so their output
// carries synthetic 1/rank scores.

/// Alternate between centroid and query, centroid first, skipping documents
/// already emitted; when one side runs dry the other is drained.
run interleave(const centroid_entry& c, const run& q, std::size_t k);

/// Weighted sum of min-max rescaled scores: delta on the centroid and
/// (1 - delta) on the query, absent documents contributing zero. A
/// constant-score or singleton list rescales to all ones.
run linear_combination(const centroid_entry& c, const run& q, double delta, std::size_t k);

/// Documents common to both lists first, in centroid order, then the rest of
/// the query's documents in query order.
run ref_reorder(const centroid_entry& c, const run& q, std::size_t k);

/// Return the centroid ranking itself, truncated to k.
run rcc(const centroid_entry& c, std::size_t k);

// --- misassignment simulation ------------------------------------------------

/// Query-to-cluster assignments in a fixed order.
struct assignment {
    std::string query_id;
    std::string cluster_id;
};

/// Reassign each query with probability epsilon to a uniformly random
/// *different* cluster. Deterministic for a given seed.
std::vector<assignment> inject_error(const std::vector<assignment>& assignments,
                                     const std::vector<std::string>& cluster_ids, double epsilon,
                                     std::uint64_t seed);

void write_assignments(std::ostream& out, const std::vector<assignment>& assignments);
std::vector<assignment> read_assignments(std::istream& in);

}  // namespace qvfuse
