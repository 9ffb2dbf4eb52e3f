#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "qvfuse/common.hpp"

namespace qvfuse {

struct scored_doc {
    doc_id_t doc;
    double score;

    bool operator==(const scored_doc&) const = default;
};

/// The single total order used everywhere: score descending, ties broken by
/// ascending internal id. Cross-strategy equality tests depend on it.
inline bool ranks_before(const scored_doc& a, const scored_doc& b) {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return a.doc < b.doc;
}

struct ranked_list {
    std::vector<scored_doc> entries;  // sorted by ranks_before
    std::size_t k = 0;                // requested depth
};

inline void sort_ranked(std::vector<scored_doc>& entries) {
    std::sort(entries.begin(), entries.end(), ranks_before);
}

/// Fixed-capacity top-k queue over the ranks_before order. A candidate whose
/// score merely ties the current threshold never enters: in document-at-a-time
/// order its internal id is larger, so it loses the tie-break.
class topk_queue {
  public:
    explicit topk_queue(std::size_t k) : k_(k) {}

    /// Could a document with this score still enter the heap?
    bool would_enter(double score) const {
        return heap_.size() < k_ || score > heap_.front().score;
    }

    double threshold() const { return heap_.size() < k_ ? 0.0 : heap_.front().score; }
    bool full() const { return heap_.size() >= k_; }

    bool insert(doc_id_t doc, double score) {
        if (heap_.size() < k_) {
            heap_.push_back({doc, score});
            std::push_heap(heap_.begin(), heap_.end(), worse_on_top);
            return true;
        }
        if (!ranks_before({doc, score}, heap_.front())) {
            return false;
        }
        std::pop_heap(heap_.begin(), heap_.end(), worse_on_top);
        heap_.back() = {doc, score};
        std::push_heap(heap_.begin(), heap_.end(), worse_on_top);
        return true;
    }

    ranked_list finish() && {
        ranked_list out;
        out.k = k_;
        out.entries = std::move(heap_);
        sort_ranked(out.entries);
        return out;
    }

  private:
    // min-heap: the worst (last-ranked) entry sits on top
    static bool worse_on_top(const scored_doc& a, const scored_doc& b) {
        return ranks_before(b, a);
    }

    std::size_t k_;
    std::vector<scored_doc> heap_;
};

}  // namespace qvfuse
