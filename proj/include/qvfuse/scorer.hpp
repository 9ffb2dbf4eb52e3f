#pragma once

#include <cmath>
#include <cstdint>

namespace qvfuse {

struct bm25_params {
    double k1 = 0.9;
    double b = 0.4;

    bool operator==(const bm25_params&) const = default;
};

struct collection_stats {
    std::uint64_t num_docs = 0;
    std::uint64_t total_tokens = 0;

    double avg_doc_length() const {
        return num_docs == 0 ? 0.0 : static_cast<double>(total_tokens) / static_cast<double>(num_docs);
    }
};

// Okapi BM25 with the guaranteed-positive idf variant
//   idf = ln(1 + (N - f_t + 0.5) / (f_t + 0.5)).
// Additive super-query scoring is only rank-safe when every per-term
// contribution is positive, which the classic idf does not guarantee.
inline double bm25_idf(std::uint64_t num_docs, std::uint64_t doc_freq) {
    const double n = static_cast<double>(num_docs);
    const double ft = static_cast<double>(doc_freq);
    return std::log(1.0 + (n - ft + 0.5) / (ft + 0.5));
}

inline double bm25_term_score(std::uint32_t term_frequency, std::uint32_t doc_length,
                              std::uint64_t doc_freq, const collection_stats& stats,
                              const bm25_params& params) {
    const double tf = static_cast<double>(term_frequency);
    const double norm = params.k1 * ((1.0 - params.b) +
                                     params.b * static_cast<double>(doc_length) / stats.avg_doc_length());
    return bm25_idf(stats.num_docs, doc_freq) * (tf * (params.k1 + 1.0)) / (tf + norm);
}

/// Per-term scorer with the idf precomputed. Evaluates the exact same
/// expression as bm25_term_score so both paths agree bit-for-bit.
class term_scorer {
  public:
    term_scorer(std::uint64_t doc_freq, const collection_stats& stats, const bm25_params& params)
        : idf_(bm25_idf(stats.num_docs, doc_freq)),
          k1_(params.k1),
          b_(params.b),
          avg_len_(stats.avg_doc_length()) {}

    double operator()(std::uint32_t term_frequency, std::uint32_t doc_length) const {
        const double tf = static_cast<double>(term_frequency);
        const double norm = k1_ * ((1.0 - b_) + b_ * static_cast<double>(doc_length) / avg_len_);
        return idf_ * (tf * (k1_ + 1.0)) / (tf + norm);
    }

  private:
    double idf_;
    double k1_;
    double b_;
    double avg_len_;
};

}  // namespace qvfuse
