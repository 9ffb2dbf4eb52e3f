#include "qvfuse/fusion.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <optional>
#include <map>
#include <thread>
#include <unordered_map>

#include "qvfuse/timing.hpp"

namespace qvfuse {

namespace {

std::vector<std::string> term_set(const std::vector<std::string>& terms) {
    std::vector<std::string> sorted = terms;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    return sorted;
}

void min_max_rescale(std::vector<scored_doc>& entries) {
    if (entries.empty()) {
        return;
    }
    double lo = entries.front().score;
    double hi = lo;
    for (const auto& e : entries) {
        lo = std::min(lo, e.score);
        hi = std::max(hi, e.score);
    }
    if (hi == lo) {
        for (auto& e : entries) {
            e.score = 1.0;
        }
        return;
    }
    for (auto& e : entries) {
        e.score = (e.score - lo) / (hi - lo);
    }
}

}  // namespace

unique_variations dedupe_variations(const query_variation_set& vs) {
    unique_variations out;
    std::map<std::vector<std::string>, std::size_t> seen;
    for (const auto& variation : vs.variations) {
        auto set = term_set(variation);
        auto it = seen.find(set);
        if (it == seen.end()) {
            seen.emplace(std::move(set), out.term_sets.size());
            out.term_sets.push_back(term_set(variation));
            out.multiplicity.push_back(1);
        } else {
            ++out.multiplicity[it->second];
        }
    }
    return out;
}

weighted_query build_super_query(const query_variation_set& vs) {
    if (vs.variations.empty()) {
        throw data_error("variation set is empty: " + vs.topic);
    }
    std::map<std::string, std::uint32_t> counts;  // sorted: canonical term order
    for (const auto& variation : vs.variations) {
        for (const auto& term : term_set(variation)) {
            ++counts[term];
        }
    }
    weighted_query query;
    query.terms.assign(counts.begin(), counts.end());
    return query;
}

ranked_list combsum_weighted(std::span<const ranked_list> lists, std::span<const double> weights,
                             bool normalize) {
    if (lists.empty()) {
        throw data_error("combsum requires at least one input list");
    }
    std::unordered_map<doc_id_t, double> sums;
    for (std::size_t i = 0; i < lists.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        if (normalize) {
            auto rescaled = lists[i].entries;
            min_max_rescale(rescaled);
            for (const auto& e : rescaled) {
                sums[e.doc] += w * e.score;
            }
        } else {
            for (const auto& e : lists[i].entries) {
                sums[e.doc] += w * e.score;
            }
        }
    }
    ranked_list out;
    out.entries.reserve(sums.size());
    for (const auto& [doc, score] : sums) {
        out.entries.push_back({doc, score});
    }
    sort_ranked(out.entries);
    out.k = out.entries.size();
    return out;
}

ranked_list combsum(std::span<const ranked_list> lists, bool normalize) {
    return combsum_weighted(lists, {}, normalize);
}

traversal_result sp_cs(const inverted_index& index, const query_variation_set& vs, std::size_t k,
                       strategy s) {
    return daat(index, build_super_query(vs), k, s);
}

sp_exhaustive_result sp_exhaustive(const inverted_index& index, const query_variation_set& vs,
                                   std::size_t k) {
    if (k == 0) {
        throw config_error("k must be at least 1");
    }
    if (vs.variations.empty()) {
        throw data_error("variation set is empty: " + vs.topic);
    }

    sp_exhaustive_result result;
    std::optional<stats_timer> timer(std::in_place, result.stats);

    auto uniq = dedupe_variations(vs);
    result.multiplicity = uniq.multiplicity;

    // Union vocabulary in sorted order: slot order below matches the
    // canonical term order of each variation's own weighted query, so the
    // per-variation sums come out bit-identical to independent runs.
    std::vector<std::string> vocabulary;
    for (const auto& terms : uniq.term_sets) {
        vocabulary.insert(vocabulary.end(), terms.begin(), terms.end());
    }
    std::sort(vocabulary.begin(), vocabulary.end());
    vocabulary.erase(std::unique(vocabulary.begin(), vocabulary.end()), vocabulary.end());

    struct union_cursor {
        const posting* pos;
        const posting* end;
        term_scorer score;
        std::uint32_t slot;
    };
    std::vector<union_cursor> cursors;
    std::unordered_map<std::string, std::uint32_t> slot_of;
    for (std::uint32_t slot = 0; slot < vocabulary.size(); ++slot) {
        slot_of.emplace(vocabulary[slot], slot);
        const auto id = index.term_id(vocabulary[slot]);
        if (!id) {
            continue;
        }
        const auto& list = index.postings(*id);
        if (list.postings.empty()) {
            continue;
        }
        cursors.push_back({list.postings.data(), list.postings.data() + list.postings.size(),
                           index.scorer_for(*id), slot});
    }

    // slot -> indices of the variations containing that term
    std::vector<std::vector<std::uint32_t>> vars_of_slot(vocabulary.size());
    for (std::uint32_t v = 0; v < uniq.term_sets.size(); ++v) {
        for (const auto& term : uniq.term_sets[v]) {
            vars_of_slot[slot_of[term]].push_back(v);
        }
    }

    std::vector<topk_queue> heaps(uniq.term_sets.size(), topk_queue(k));
    std::vector<double> var_score(uniq.term_sets.size(), 0.0);
    std::vector<std::uint32_t> touched_vars;

    constexpr doc_id_t no_more = std::numeric_limits<doc_id_t>::max();
    while (true) {
        doc_id_t pivot = no_more;
        for (const auto& c : cursors) {
            if (c.pos != c.end) {
                pivot = std::min(pivot, c.pos->doc);
            }
        }
        if (pivot == no_more) {
            break;
        }
        const auto doc_length = index.doc(pivot).length;
        touched_vars.clear();
        // Cursors are in ascending slot order, so each variation accumulates
        // its contributions in canonical term order.
        for (auto& c : cursors) {
            if (c.pos != c.end && c.pos->doc == pivot) {
                const double part = c.score(c.pos->freq, doc_length);
                ++result.stats.postings_scored;
                for (const auto v : vars_of_slot[c.slot]) {
                    if (var_score[v] == 0.0) {
                        touched_vars.push_back(v);
                    }
                    var_score[v] += part;
                }
                ++c.pos;
            }
        }
        for (const auto v : touched_vars) {
            heaps[v].insert(pivot, var_score[v]);
            var_score[v] = 0.0;
        }
    }

    result.per_variation.reserve(heaps.size());
    for (auto& heap : heaps) {
        result.per_variation.push_back(std::move(heap).finish());
    }
    timer.reset();
    return result;
}

ranked_list fuse_variation_lists(const sp_exhaustive_result& lists) {
    std::vector<double> weights(lists.multiplicity.begin(), lists.multiplicity.end());
    return combsum_weighted(lists.per_variation, weights, false);
}

pf_result pf(const inverted_index& index, const query_variation_set& vs, std::size_t k,
             std::size_t worker_budget, strategy s) {
    if (worker_budget == 0) {
        throw config_error("worker budget must be at least 1");
    }
    if (vs.variations.empty()) {
        throw data_error("variation set is empty: " + vs.topic);
    }

    auto uniq = dedupe_variations(vs);
    const std::size_t tasks = uniq.term_sets.size();
    std::vector<traversal_result> per_variation(tasks);

    const std::size_t workers = std::min(worker_budget, tasks);
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks) {
                return;
            }
            per_variation[i] = daat(index, weighted_query::from_terms(uniq.term_sets[i]), k, s);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    pf_result result;
    std::chrono::nanoseconds slowest{0};
    for (const auto& r : per_variation) {
        result.stats.postings_scored += r.stats.postings_scored;
        result.stats.cpu += r.stats.cpu;
        result.stats.cpu_is_wall = result.stats.cpu_is_wall || r.stats.cpu_is_wall;
        slowest = std::max(slowest, r.stats.elapsed);
    }

    const auto fuse_start = std::chrono::steady_clock::now();
    std::vector<ranked_list> lists;
    lists.reserve(tasks);
    for (auto& r : per_variation) {
        lists.push_back(std::move(r.top));
    }
    std::vector<double> weights(uniq.multiplicity.begin(), uniq.multiplicity.end());
    result.fused = combsum_weighted(lists, weights, false);
    const auto fuse_elapsed = std::chrono::steady_clock::now() - fuse_start;
    result.stats.elapsed = slowest + fuse_elapsed;
    return result;
}

query_variation_set sample_variants(const query_variation_set& vs, std::size_t m,
                                    std::uint64_t seed) {
    if (m == 0) {
        throw config_error("sample size must be at least 1");
    }
    if (vs.variations.empty()) {
        throw data_error("variation set is empty: " + vs.topic);
    }
    rng r(seed);
    query_variation_set out;
    out.topic = vs.topic;
    out.variations.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        out.variations.push_back(vs.variations[r.bounded(vs.variations.size())]);
    }
    return out;
}

}  // namespace qvfuse
