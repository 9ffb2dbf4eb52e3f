#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qvfuse/common.hpp"
#include "qvfuse/scorer.hpp"

namespace qvfuse {

struct posting {
    doc_id_t doc;
    std::uint32_t freq;

    bool operator==(const posting&) const = default;
};

struct score_block {
    doc_id_t last_doc;  // last internal id covered by this block
    double max_score;   // exact max of term scores inside the block
};

struct postings_list {
    std::vector<posting> postings;
    // Set by compute_upper_bounds / compute_block_maxima for the active
    // scorer configuration; zero / empty until then.
    double upper_bound = 0.0;
    std::vector<score_block> blocks;

    std::size_t document_frequency() const { return postings.size(); }
};

struct doc_entry {
    std::string name;  // external identifier
    std::uint32_t length;
};

struct corpus_document {
    std::string name;
    std::string text;
};

/// Document-ordered inverted index. Construction is single-threaded; once
/// bounds and block maxima are computed the structure is immutable and safe
/// to share across concurrent read-only traversals.
class inverted_index {
  public:
    static inverted_index build(const std::vector<corpus_document>& corpus);
    static inverted_index build_tsv(std::istream& corpus);

    /// Build directly from pre-normalized term sequences (used for the
    /// pseudo-document cluster index).
    static inverted_index build_from_terms(
        const std::vector<std::pair<std::string, std::vector<std::string>>>& docs);

    const collection_stats& stats() const { return stats_; }
    std::size_t num_docs() const { return doc_table_.size(); }
    std::size_t num_terms() const { return terms_.size(); }

    const doc_entry& doc(doc_id_t id) const { return doc_table_[id]; }
    const std::vector<doc_entry>& doc_table() const { return doc_table_; }
    std::optional<doc_id_t> doc_by_name(std::string_view name) const;

    /// Absent terms yield an empty postings list, never an error.
    const postings_list& postings(std::string_view term) const;
    std::optional<term_id_t> term_id(std::string_view term) const;
    const std::string& term_name(term_id_t id) const { return terms_[id]; }
    const postings_list& postings(term_id_t id) const { return lists_[id]; }

    /// Exact per-term score upper bounds for the given scorer configuration.
    void compute_upper_bounds(const bm25_params& params);
    /// Exact per-block score maxima; blocks hold at most block_size postings.
    void compute_block_maxima(std::uint32_t block_size);

    bool bounds_ready() const { return bounds_ready_; }
    bool blocks_ready() const { return block_size_ > 0; }
    const bm25_params& bound_params() const { return bound_params_; }
    std::uint32_t block_size() const { return block_size_; }

    term_scorer scorer_for(term_id_t id) const {
        return term_scorer(lists_[id].postings.size(), stats_, bound_params_);
    }

    /// Versioned flat serialization: lexicon, postings, doc table, stats.
    /// Bounds and block maxima are recomputed after load.
    void save(const std::filesystem::path& dir) const;
    static inverted_index load(const std::filesystem::path& dir);

  private:
    term_id_t intern_term(const std::string& term);
    void add_document(const std::string& name, const std::vector<std::string>& terms);
    void finish();

    std::unordered_map<std::string, term_id_t> lexicon_;
    std::vector<std::string> terms_;
    std::vector<postings_list> lists_;
    std::vector<doc_entry> doc_table_;
    std::unordered_map<std::string, doc_id_t> doc_lookup_;
    collection_stats stats_;
    bm25_params bound_params_;
    bool bounds_ready_ = false;
    std::uint32_t block_size_ = 0;
};

}  // namespace qvfuse
