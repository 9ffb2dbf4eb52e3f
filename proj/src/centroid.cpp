#include "qvfuse/centroid.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "qvfuse/traversal.hpp"

namespace qvfuse {

centroid_entry centroid_entry::from_run(std::string cluster_id, run ranking, std::size_t depth) {
    centroid_entry entry;
    entry.cluster_id = std::move(cluster_id);
    if (ranking.size() > depth) {
        ranking.resize(depth);
    }
    entry.ranking = std::move(ranking);
    entry.rank_of.reserve(entry.ranking.size());
    for (std::size_t i = 0; i < entry.ranking.size(); ++i) {
        entry.rank_of.emplace(entry.ranking[i].doc, i);
    }
    return entry;
}

void centroid_store::add(centroid_entry entry) {
    if (index_.count(entry.cluster_id)) {
        throw data_error("duplicate centroid cluster: " + entry.cluster_id);
    }
    index_.emplace(entry.cluster_id, entries_.size());
    entries_.push_back(std::move(entry));
}

const centroid_entry* centroid_store::find(const std::string& cluster_id) const {
    auto it = index_.find(cluster_id);
    return it == index_.end() ? nullptr : &entries_[it->second];
}

void centroid_store::save(const std::filesystem::path& file, bool rank_only) const {
    std::ofstream out(file);
    if (!out) {
        throw data_error("cannot write centroid store: " + file.string());
    }
    out << "qvfuse-centroids 1 " << (rank_only ? "rank-only" : "scored") << '\n';
    for (const auto& entry : entries_) {
        out << "cluster " << entry.cluster_id << ' ' << entry.ranking.size() << '\n';
        for (const auto& e : entry.ranking) {
            if (rank_only) {
                out << e.doc << '\n';
            } else {
                out << e.doc << ' ' << format_score(e.score) << '\n';
            }
        }
    }
}

centroid_store centroid_store::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw data_error("cannot open centroid store: " + file.string());
    }
    std::string magic, mode;
    int version = 0;
    in >> magic >> version >> mode;
    if (magic != "qvfuse-centroids" || version != 1 || (mode != "scored" && mode != "rank-only")) {
        throw data_error("unrecognized centroid store format: " + file.string());
    }
    const bool rank_only = mode == "rank-only";
    centroid_store store;
    std::string keyword;
    while (in >> keyword) {
        if (keyword != "cluster") {
            throw data_error("malformed centroid store near: " + keyword);
        }
        std::string cluster_id;
        std::size_t depth = 0;
        if (!(in >> cluster_id >> depth)) {
            throw data_error("malformed centroid header in: " + file.string());
        }
        run ranking;
        ranking.reserve(depth);
        for (std::size_t i = 0; i < depth; ++i) {
            run_entry e;
            if (!(in >> e.doc)) {
                throw data_error("truncated centroid store: " + file.string());
            }
            if (rank_only) {
                // Synthetic descending scores keep rank-based pipelines valid.
                e.score = 1.0 / static_cast<double>(i + 1);
            } else if (!(in >> e.score)) {
                throw data_error("truncated centroid store: " + file.string());
            }
            ranking.push_back(std::move(e));
        }
        store.add(centroid_entry::from_run(cluster_id, std::move(ranking)));
    }
    return store;
}

centroid_entry build_centroid(const inverted_index& index, const query_variation_set& vs,
                              std::size_t depth, strategy s) {
    auto result = sp_cs(index, vs, depth, s);
    return centroid_entry::from_run(vs.topic, to_run(result.top, index), depth);
}

centroid_entry build_centroid_multirun(std::string cluster_id, const std::vector<run>& lists,
                                       std::size_t depth) {
    if (lists.empty()) {
        throw data_error("multi-run centroid needs at least one input run: " + cluster_id);
    }
    return centroid_entry::from_run(std::move(cluster_id), combsum_runs(lists, false), depth);
}

std::vector<std::string> pseudo_doc_terms(const query_variation_set& vs) {
    std::vector<std::string> terms;
    for (const auto& variation : vs.variations) {
        terms.insert(terms.end(), variation.begin(), variation.end());
    }
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    return terms;
}

inverted_index build_pseudo_index(const std::vector<query_variation_set>& clusters,
                                  const bm25_params& params) {
    if (clusters.empty()) {
        throw data_error("cannot build a pseudo index from zero clusters");
    }
    std::vector<std::pair<std::string, std::vector<std::string>>> docs;
    docs.reserve(clusters.size());
    for (const auto& cluster : clusters) {
        docs.emplace_back(cluster.topic, pseudo_doc_terms(cluster));
    }
    auto index = inverted_index::build_from_terms(docs);
    index.compute_upper_bounds(params);
    return index;
}

cluster_match match_cluster(const std::vector<std::string>& query_terms,
                            const inverted_index& pseudo_index, double min_score) {
    cluster_match match;
    const auto result = daat_exhaustive(pseudo_index, weighted_query::from_terms(query_terms), 1);
    if (result.top.entries.empty()) {
        return match;
    }
    const auto& best = result.top.entries.front();
    if (min_score > 0.0 && best.score < min_score) {
        return match;
    }
    match.cluster_id = pseudo_index.doc(best.doc).name;
    match.score = best.score;
    return match;
}

namespace {

void require_k(std::size_t k) {
    if (k == 0) {
        throw config_error("k must be at least 1");
    }
}

run with_rank_scores(run r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i].score = 1.0 / static_cast<double>(i + 1);
    }
    return r;
}

}  // namespace

run interleave(const centroid_entry& c, const run& q, std::size_t k) {
    require_k(k);
    run out;
    out.reserve(std::min(k, c.ranking.size() + q.size()));
    std::unordered_set<std::string> emitted;
    std::size_t ci = 0;
    std::size_t qi = 0;
    bool centroid_turn = true;  // biased towards the centroid: it goes first
    while (out.size() < k) {
        auto take_from = [&](const run& source, std::size_t& pos) {
            while (pos < source.size() && emitted.count(source[pos].doc)) {
                ++pos;
            }
            if (pos >= source.size()) {
                return false;
            }
            emitted.insert(source[pos].doc);
            out.push_back(source[pos]);
            ++pos;
            return true;
        };
        const bool took = centroid_turn ? take_from(c.ranking, ci) : take_from(q, qi);
        if (!took) {
            // This side is exhausted: drain the other.
            const bool other = centroid_turn ? take_from(q, qi) : take_from(c.ranking, ci);
            if (!other) {
                break;
            }
        }
        centroid_turn = !centroid_turn;
    }
    return with_rank_scores(std::move(out));
}

run linear_combination(const centroid_entry& c, const run& q, double delta, std::size_t k) {
    require_k(k);
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw config_error("linear combination weight must lie in [0, 1]");
    }
    auto rescale = [](const run& r) {
        run scaled = r;
        if (scaled.empty()) {
            return scaled;
        }
        double lo = scaled.front().score;
        double hi = lo;
        for (const auto& e : scaled) {
            lo = std::min(lo, e.score);
            hi = std::max(hi, e.score);
        }
        for (auto& e : scaled) {
            e.score = (hi == lo) ? 1.0 : (e.score - lo) / (hi - lo);
        }
        return scaled;
    };
    std::unordered_map<std::string, double> combined;
    for (const auto& e : rescale(c.ranking)) {
        combined[e.doc] += delta * e.score;
    }
    for (const auto& e : rescale(q)) {
        combined[e.doc] += (1.0 - delta) * e.score;
    }
    run out;
    out.reserve(combined.size());
    for (const auto& [doc, score] : combined) {
        out.push_back({doc, score});
    }
    std::sort(out.begin(), out.end(), [](const run_entry& a, const run_entry& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.doc < b.doc;
    });
    if (out.size() > k) {
        out.resize(k);
    }
    return out;
}

run ref_reorder(const centroid_entry& c, const run& q, std::size_t k) {
    require_k(k);
    std::unordered_set<std::string> in_query;
    in_query.reserve(q.size());
    for (const auto& e : q) {
        in_query.insert(e.doc);
    }
    run out;
    out.reserve(std::min(k, q.size()));
    for (const auto& e : c.ranking) {
        if (out.size() >= k) {
            break;
        }
        if (in_query.count(e.doc)) {
            out.push_back(e);
        }
    }
    for (const auto& e : q) {
        if (out.size() >= k) {
            break;
        }
        if (!c.contains(e.doc)) {
            out.push_back(e);
        }
    }
    return with_rank_scores(std::move(out));
}

run rcc(const centroid_entry& c, std::size_t k) {
    require_k(k);
    run out = c.ranking;
    if (out.size() > k) {
        out.resize(k);
    }
    return out;
}

std::vector<assignment> inject_error(const std::vector<assignment>& assignments,
                                     const std::vector<std::string>& cluster_ids, double epsilon,
                                     std::uint64_t seed) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw config_error("error rate must lie in [0, 1]");
    }
    if (epsilon > 0.0 && cluster_ids.size() < 2) {
        throw config_error("misassignment needs at least 2 clusters");
    }
    rng r(seed);
    auto out = assignments;
    for (auto& a : out) {
        if (epsilon == 0.0 || r.unit() >= epsilon) {
            continue;
        }
        // Uniform over the clusters other than the current one.
        std::size_t own = cluster_ids.size();
        for (std::size_t i = 0; i < cluster_ids.size(); ++i) {
            if (cluster_ids[i] == a.cluster_id) {
                own = i;
                break;
            }
        }
        std::size_t pick = r.bounded(cluster_ids.size() - (own < cluster_ids.size() ? 1 : 0));
        if (own < cluster_ids.size() && pick >= own) {
            ++pick;
        }
        a.cluster_id = cluster_ids[pick];
    }
    return out;
}

void write_assignments(std::ostream& out, const std::vector<assignment>& assignments) {
    for (const auto& a : assignments) {
        out << a.query_id << '\t' << a.cluster_id << '\n';
    }
}

std::vector<assignment> read_assignments(std::istream& in) {
    std::vector<assignment> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw data_error("assignment line " + std::to_string(lineno) +
                             ": expected query_id<TAB>cluster_id");
        }
        out.push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
    return out;
}

}  // namespace qvfuse
