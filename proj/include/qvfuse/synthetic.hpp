#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "qvfuse/fusion.hpp"
#include "qvfuse/index.hpp"

namespace qvfuse {

/// Distractor clusters for the matching experiments: seeded vocabulary
/// sampler with a controllable probability of borrowing terms from a given
/// pool (e.g. the true clusters' vocabulary).
struct distractor_params {
    std::size_t clusters = 100;
    std::size_t variations_per_cluster = 4;
    std::size_t terms_per_variation = 3;
    std::size_t fresh_vocabulary = 4000;  // size of the synthetic term space
    double overlap_probability = 0.0;     // chance a term comes from the pool
};

std::vector<query_variation_set> make_distractor_clusters(const distractor_params& params,
                                                          const std::vector<std::string>& pool,
                                                          std::uint64_t seed);

/// Collect the distinct terms used by a set of clusters.
std::vector<std::string> cluster_vocabulary(const std::vector<query_variation_set>& clusters);

/// A synthetic collection with planted relevance: each topic owns a disjoint
/// vocabulary, relevant documents cover random facets of it, and query
/// variations are noisy partial views. Fusing more variations covers more of
/// the topic, which is what the fusion-benefit trend tests measure.
struct planted_params {
    std::size_t topics = 8;
    std::size_t topic_terms = 8;          // vocabulary size per topic
    std::size_t relevant_per_topic = 12;  // graded 1
    std::size_t noise_docs = 300;
    std::size_t terms_per_relevant = 3;   // topic terms per relevant doc
    std::size_t noise_terms_per_doc = 6;
    std::size_t noise_vocabulary = 500;
    std::size_t training_variations = 8;  // per topic
    std::size_t heldout_variations = 3;   // per topic
    std::size_t terms_per_variation = 2;
    double variation_noise = 0.15;  // chance a variation carries a noise term
};

struct planted_collection {
    std::vector<corpus_document> corpus;
    std::vector<query_variation_set> clusters;       // training variations
    std::vector<query_variation_set> heldout;        // held-out variations per topic
    std::map<std::string, std::map<std::string, int>> judgments;  // topic -> doc -> grade
};

planted_collection make_planted_collection(const planted_params& params, std::uint64_t seed);

}  // namespace qvfuse
