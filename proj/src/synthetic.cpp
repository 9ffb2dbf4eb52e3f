#include "qvfuse/synthetic.hpp"

#include <algorithm>
#include <set>

#include "qvfuse/rng.hpp"

namespace qvfuse {

namespace {

std::string fresh_term(std::size_t i) {
    return "syn" + std::to_string(i);
}

std::string topic_term(std::size_t topic, std::size_t i) {
    return "top" + std::to_string(topic) + "w" + std::to_string(i);
}

std::string noise_term(std::size_t i) {
    return "noise" + std::to_string(i);
}

std::string join(const std::vector<std::string>& terms) {
    std::string text;
    for (const auto& t : terms) {
        if (!text.empty()) {
            text.push_back(' ');
        }
        text += t;
    }
    return text;
}

/// Sample `count` distinct indices from [0, universe).
std::vector<std::size_t> sample_distinct(std::size_t universe, std::size_t count, rng& r) {
    count = std::min(count, universe);
    std::set<std::size_t> picked;
    while (picked.size() < count) {
        picked.insert(static_cast<std::size_t>(r.bounded(universe)));
    }
    return {picked.begin(), picked.end()};
}

}  // namespace

std::vector<query_variation_set> make_distractor_clusters(const distractor_params& params,
                                                          const std::vector<std::string>& pool,
                                                          std::uint64_t seed) {
    rng r(seed);
    std::vector<query_variation_set> clusters;
    clusters.reserve(params.clusters);
    for (std::size_t c = 0; c < params.clusters; ++c) {
        query_variation_set vs;
        vs.topic = "distractor" + std::to_string(c);
        for (std::size_t v = 0; v < params.variations_per_cluster; ++v) {
            std::vector<std::string> terms;
            terms.reserve(params.terms_per_variation);
            for (std::size_t t = 0; t < params.terms_per_variation; ++t) {
                if (!pool.empty() && r.unit() < params.overlap_probability) {
                    terms.push_back(pool[r.bounded(pool.size())]);
                } else {
                    terms.push_back(fresh_term(r.bounded(params.fresh_vocabulary)));
                }
            }
            vs.variations.push_back(std::move(terms));
        }
        clusters.push_back(std::move(vs));
    }
    return clusters;
}

std::vector<std::string> cluster_vocabulary(const std::vector<query_variation_set>& clusters) {
    std::set<std::string> vocab;
    for (const auto& cluster : clusters) {
        for (const auto& variation : cluster.variations) {
            vocab.insert(variation.begin(), variation.end());
        }
    }
    return {vocab.begin(), vocab.end()};
}

planted_collection make_planted_collection(const planted_params& params, std::uint64_t seed) {
    rng r(seed);
    planted_collection out;

    std::size_t doc_counter = 0;
    for (std::size_t t = 0; t < params.topics; ++t) {
        const std::string topic = "T" + std::to_string(t);
        for (std::size_t d = 0; d < params.relevant_per_topic; ++d) {
            // A relevant document covers a random facet of the topic
            // vocabulary plus background noise.
            std::vector<std::string> terms;
            for (const auto i : sample_distinct(params.topic_terms, params.terms_per_relevant, r)) {
                terms.push_back(topic_term(t, i));
            }
            for (std::size_t n = 0; n < params.noise_terms_per_doc; ++n) {
                terms.push_back(noise_term(r.bounded(params.noise_vocabulary)));
            }
            const std::string name = "doc" + std::to_string(doc_counter++);
            out.corpus.push_back({name, join(terms)});
            out.judgments[topic][name] = 1;
        }
    }
    for (std::size_t d = 0; d < params.noise_docs; ++d) {
        std::vector<std::string> terms;
        for (std::size_t n = 0; n < params.noise_terms_per_doc; ++n) {
            terms.push_back(noise_term(r.bounded(params.noise_vocabulary)));
        }
        out.corpus.push_back({"doc" + std::to_string(doc_counter++), join(terms)});
    }

    auto make_variation = [&](std::size_t t) {
        std::vector<std::string> terms;
        for (const auto i : sample_distinct(params.topic_terms, params.terms_per_variation, r)) {
            terms.push_back(topic_term(t, i));
        }
        if (r.unit() < params.variation_noise) {
            terms.push_back(noise_term(r.bounded(params.noise_vocabulary)));
        }
        return terms;
    };

    for (std::size_t t = 0; t < params.topics; ++t) {
        const std::string topic = "T" + std::to_string(t);
        query_variation_set training{topic, {}};
        for (std::size_t v = 0; v < params.training_variations; ++v) {
            training.variations.push_back(make_variation(t));
        }
        out.clusters.push_back(std::move(training));

        query_variation_set heldout{topic, {}};
        for (std::size_t v = 0; v < params.heldout_variations; ++v) {
            heldout.variations.push_back(make_variation(t));
        }
        out.heldout.push_back(std::move(heldout));
    }
    return out;
}

}  // namespace qvfuse
