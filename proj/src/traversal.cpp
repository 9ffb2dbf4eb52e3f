#include "qvfuse/traversal.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include "qvfuse/timing.hpp"

namespace qvfuse {

namespace {

constexpr doc_id_t kNoMoreDocs = std::numeric_limits<doc_id_t>::max();

struct cursor {
    const posting* pos;
    const posting* end;
    const score_block* block;
    const score_block* block_end;
    term_scorer score;
    double weight;  // query-time multiplier n_t
    double bound;   // U_t * n_t
    std::uint32_t slot;

    bool exhausted() const { return pos == end; }
    doc_id_t docid() const { return pos->doc; }
    void next() { ++pos; }

    void next_geq(doc_id_t target) {
        pos = std::lower_bound(pos, end, target,
                               [](const posting& p, doc_id_t d) { return p.doc < d; });
    }

    /// Move the block pointer to the block that would contain `target`,
    /// clamped to the final block. A cursor whose postings end before the
    /// target contributes nothing there, so its last block max stays a valid
    /// (if loose) bound.
    void shallow_advance(doc_id_t target) {
        while (block + 1 != block_end && block->last_doc < target) {
            ++block;
        }
    }

    double block_bound() const { return weight * block->max_score; }
};

std::vector<cursor> make_cursors(const inverted_index& index, const weighted_query& query,
                                 bool with_blocks) {
    std::vector<cursor> cursors;
    cursors.reserve(query.terms.size());
    for (std::uint32_t slot = 0; slot < query.terms.size(); ++slot) {
        const auto& [term, n_t] = query.terms[slot];
        const auto id = index.term_id(term);
        if (!id) {
            continue;
        }
        const auto& list = index.postings(*id);
        if (list.postings.empty()) {
            continue;
        }
        cursor c{list.postings.data(),
                 list.postings.data() + list.postings.size(),
                 with_blocks ? list.blocks.data() : nullptr,
                 with_blocks ? list.blocks.data() + list.blocks.size() : nullptr,
                 index.scorer_for(*id),
                 static_cast<double>(n_t),
                 static_cast<double>(n_t) * list.upper_bound,
                 slot};
        cursors.push_back(c);
    }
    return cursors;
}

// Scores are always summed in ascending slot order, no matter which order a
// strategy discovered the contributions in. Floating-point addition is not
// associative, so this is what keeps the pruned strategies bit-identical to
// the exhaustive reference.
class slot_accumulator {
  public:
    explicit slot_accumulator(std::size_t slots) : contrib_(slots, 0.0) {}

    void reset() {
        for (const auto s : touched_) {
            contrib_[s] = 0.0;
        }
        touched_.clear();
    }

    void add(std::uint32_t slot, double value) {
        contrib_[slot] = value;
        touched_.push_back(slot);
    }

    double canonical_sum() {
        std::sort(touched_.begin(), touched_.end());
        double sum = 0.0;
        for (const auto s : touched_) {
            sum += contrib_[s];
        }
        return sum;
    }

  private:
    std::vector<double> contrib_;
    std::vector<std::uint32_t> touched_;
};

void require_k(std::size_t k) {
    if (k == 0) {
        throw config_error("k must be at least 1");
    }
}

void require_bounds(const inverted_index& index) {
    if (!index.bounds_ready()) {
        throw config_error("dynamic pruning requires compute_upper_bounds");
    }
}

/// Keep `order` sorted by (docid, slot) after `order[idx]` advanced.
void bubble_forward(std::vector<cursor*>& order, std::size_t idx) {
    while (idx + 1 < order.size()) {
        const auto a = order[idx];
        const auto b = order[idx + 1];
        if (std::make_pair(a->docid(), a->slot) <= std::make_pair(b->docid(), b->slot)) {
            break;
        }
        std::swap(order[idx], order[idx + 1]);
        ++idx;
    }
}

void drop_exhausted(std::vector<cursor*>& order) {
    std::erase_if(order, [](const cursor* c) { return c->exhausted(); });
}

}  // namespace

weighted_query weighted_query::from_terms(const std::vector<std::string>& terms) {
    std::vector<std::string> sorted = terms;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    weighted_query query;
    query.terms.reserve(sorted.size());
    for (auto& t : sorted) {
        query.terms.emplace_back(std::move(t), 1);
    }
    return query;
}

strategy strategy_from_name(std::string_view name) {
    if (name == "exhaustive") {
        return strategy::exhaustive;
    }
    if (name == "maxscore") {
        return strategy::maxscore;
    }
    if (name == "wand") {
        return strategy::wand;
    }
    if (name == "bmw") {
        return strategy::bmw;
    }
    throw config_error("unknown traversal strategy: " + std::string(name));
}

std::string_view strategy_name(strategy s) {
    switch (s) {
        case strategy::exhaustive: return "exhaustive";
        case strategy::maxscore: return "maxscore";
        case strategy::wand: return "wand";
        case strategy::bmw: return "bmw";
    }
    return "?";
}

traversal_result daat_exhaustive(const inverted_index& index, const weighted_query& query,
                                 std::size_t k) {
    require_k(k);
    traversal_result result;
    {
        stats_timer timer(result.stats);
        auto cursors = make_cursors(index, query, false);
        topk_queue topk(k);
        while (true) {
            doc_id_t pivot = kNoMoreDocs;
            for (const auto& c : cursors) {
                if (!c.exhausted()) {
                    pivot = std::min(pivot, c.docid());
                }
            }
            if (pivot == kNoMoreDocs) {
                break;
            }
            const auto doc_length = index.doc(pivot).length;
            double score = 0.0;  // cursors are in slot order: this sum is canonical
            for (auto& c : cursors) {
                if (!c.exhausted() && c.docid() == pivot) {
                    score += c.weight * c.score(c.pos->freq, doc_length);
                    ++result.stats.postings_scored;
                    c.next();
                }
            }
            topk.insert(pivot, score);
        }
        result.top = std::move(topk).finish();
    }
    return result;
}

traversal_result daat_maxscore(const inverted_index& index, const weighted_query& query,
                               std::size_t k) {
    require_k(k);
    require_bounds(index);
    traversal_result result;
    std::optional<stats_timer> timer(std::in_place, result.stats);

    auto cursors = make_cursors(index, query, false);
    if (cursors.empty()) {
        result.top = topk_queue(k).finish();
        timer.reset();
        return result;
    }

    // Ascending by scaled upper bound; prefix_bound[i] caps the total score
    // attainable from lists 0..i.
    std::vector<cursor*> order;
    order.reserve(cursors.size());
    for (auto& c : cursors) {
        order.push_back(&c);
    }
    std::sort(order.begin(), order.end(), [](const cursor* a, const cursor* b) {
        return std::make_pair(a->bound, a->slot) < std::make_pair(b->bound, b->slot);
    });
    std::vector<double> prefix_bound(order.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        acc += order[i]->bound;
        prefix_bound[i] = acc;
    }

    topk_queue topk(k);
    slot_accumulator contribs(query.terms.size());
    std::size_t first_essential = 0;

    doc_id_t cur = kNoMoreDocs;
    for (const auto* c : order) {
        cur = std::min(cur, c->docid());
    }

    while (first_essential < order.size() && cur != kNoMoreDocs) {
        const auto doc_length = index.doc(cur).length;
        contribs.reset();
        double running = 0.0;
        doc_id_t next = kNoMoreDocs;

        for (std::size_t i = first_essential; i < order.size(); ++i) {
            auto* c = order[i];
            if (!c->exhausted() && c->docid() == cur) {
                const double part = c->weight * c->score(c->pos->freq, doc_length);
                contribs.add(c->slot, part);
                running += part;
                ++result.stats.postings_scored;
                c->next();
            }
            if (!c->exhausted()) {
                next = std::min(next, c->docid());
            }
        }

        // Walk the non-essential lists from the largest bound down, bailing
        // out as soon as the document can no longer reach the heap.
        bool fully_scored = true;
        for (std::size_t i = first_essential; i-- > 0;) {
            if (!topk.would_enter(running + prefix_bound[i])) {
                fully_scored = false;
                break;
            }
            auto* c = order[i];
            c->next_geq(cur);
            if (!c->exhausted() && c->docid() == cur) {
                const double part = c->weight * c->score(c->pos->freq, doc_length);
                contribs.add(c->slot, part);
                running += part;
                ++result.stats.postings_scored;
            }
        }

        if (fully_scored && topk.insert(cur, contribs.canonical_sum())) {
            while (first_essential < order.size() &&
                   !topk.would_enter(prefix_bound[first_essential])) {
                ++first_essential;
            }
        }
        cur = next;
    }

    result.top = std::move(topk).finish();
    timer.reset();
    return result;
}

namespace {

/// Shared WAND / BMW loop. BMW additionally filters candidates through the
/// per-block maxima and can jump past whole blocks.
traversal_result wand_family(const inverted_index& index, const weighted_query& query,
                             std::size_t k, bool use_blocks) {
    traversal_result result;
    std::optional<stats_timer> timer(std::in_place, result.stats);

    auto cursors = make_cursors(index, query, use_blocks);
    std::vector<cursor*> order;
    order.reserve(cursors.size());
    for (auto& c : cursors) {
        order.push_back(&c);
    }
    std::sort(order.begin(), order.end(), [](const cursor* a, const cursor* b) {
        return std::make_pair(a->docid(), a->slot) < std::make_pair(b->docid(), b->slot);
    });

    topk_queue topk(k);
    slot_accumulator contribs(query.terms.size());

    while (!order.empty()) {
        // Pivot: first cursor (docid order) where the cumulative upper bound
        // could still enter the heap; extended across equal docids so a full
        // evaluation sees every matching list.
        double acc = 0.0;
        std::size_t pivot = order.size();
        for (std::size_t i = 0; i < order.size(); ++i) {
            acc += order[i]->bound;
            if (topk.would_enter(acc)) {
                pivot = i;
                break;
            }
        }
        if (pivot == order.size()) {
            break;
        }
        const doc_id_t pivot_doc = order[pivot]->docid();
        while (pivot + 1 < order.size() && order[pivot + 1]->docid() == pivot_doc) {
            ++pivot;
        }

        if (use_blocks) {
            double block_sum = 0.0;
            for (std::size_t i = 0; i <= pivot; ++i) {
                order[i]->shallow_advance(pivot_doc);
                block_sum += order[i]->block_bound();
            }
            if (!topk.would_enter(block_sum)) {
                // Every document up to the nearest block boundary is covered
                // by the same block maxima; jump straight past them.
                doc_id_t boundary = kNoMoreDocs;
                for (std::size_t i = 0; i <= pivot; ++i) {
                    boundary = std::min(boundary, order[i]->block->last_doc);
                }
                doc_id_t target = boundary == kNoMoreDocs ? kNoMoreDocs : boundary + 1;
                if (target <= pivot_doc) {
                    target = pivot_doc + 1;
                }
                if (pivot + 1 < order.size()) {
                    target = std::min(target, order[pivot + 1]->docid());
                }
                std::size_t victim = 0;
                for (std::size_t i = 1; i <= pivot; ++i) {
                    if (order[i]->bound > order[victim]->bound) {
                        victim = i;
                    }
                }
                order[victim]->next_geq(target);
                if (order[victim]->exhausted()) {
                    drop_exhausted(order);
                } else {
                    bubble_forward(order, victim);
                }
                continue;
            }
        }

        if (order[0]->docid() == pivot_doc) {
            // Fully aligned: every cursor at pivot_doc is in the prefix.
            const auto doc_length = index.doc(pivot_doc).length;
            contribs.reset();
            std::size_t advanced = 0;
            for (std::size_t i = 0; i <= pivot; ++i) {
                auto* c = order[i];
                contribs.add(c->slot, c->weight * c->score(c->pos->freq, doc_length));
                ++result.stats.postings_scored;
                c->next();
                ++advanced;
            }
            topk.insert(pivot_doc, contribs.canonical_sum());
            bool any_exhausted = false;
            for (std::size_t i = 0; i < advanced; ++i) {
                any_exhausted = any_exhausted || order[i]->exhausted();
            }
            if (any_exhausted) {
                drop_exhausted(order);
                std::sort(order.begin(), order.end(), [](const cursor* a, const cursor* b) {
                    return std::make_pair(a->docid(), a->slot) <
                           std::make_pair(b->docid(), b->slot);
                });
            } else {
                for (std::size_t i = advanced; i-- > 0;) {
                    bubble_forward(order, i);
                }
            }
        } else {
            // Advance the strongest trailing cursor up to the pivot.
            std::size_t victim = 0;
            for (std::size_t i = 1; i <= pivot && order[i]->docid() < pivot_doc; ++i) {
                if (order[i]->bound > order[victim]->bound) {
                    victim = i;
                }
            }
            order[victim]->next_geq(pivot_doc);
            if (order[victim]->exhausted()) {
                drop_exhausted(order);
            } else {
                bubble_forward(order, victim);
            }
        }
    }

    result.top = std::move(topk).finish();
    timer.reset();
    return result;
}

}  // namespace

traversal_result daat_wand(const inverted_index& index, const weighted_query& query,
                           std::size_t k) {
    require_k(k);
    require_bounds(index);
    return wand_family(index, query, k, false);
}

traversal_result daat_bmw(const inverted_index& index, const weighted_query& query,
                          std::size_t k) {
    require_k(k);
    require_bounds(index);
    if (!index.blocks_ready()) {
        throw config_error("block-max traversal requires compute_block_maxima");
    }
    return wand_family(index, query, k, true);
}

traversal_result daat(const inverted_index& index, const weighted_query& query, std::size_t k,
                      strategy s) {
    switch (s) {
        case strategy::exhaustive: return daat_exhaustive(index, query, k);
        case strategy::maxscore: return daat_maxscore(index, query, k);
        case strategy::wand: return daat_wand(index, query, k);
        case strategy::bmw: return daat_bmw(index, query, k);
    }
    throw config_error("unknown traversal strategy");
}

}  // namespace qvfuse
