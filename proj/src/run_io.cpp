#include "qvfuse/run_io.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "qvfuse/text.hpp"

namespace qvfuse {

void run_file::add(const std::string& topic, run r) {
    if (!by_topic.count(topic)) {
        topics.push_back(topic);
    }
    by_topic[topic] = std::move(r);
}

run to_run(const ranked_list& list, const inverted_index& index) {
    run out;
    out.reserve(list.entries.size());
    for (const auto& e : list.entries) {
        out.push_back({index.doc(e.doc).name, e.score});
    }
    return out;
}

std::string format_score(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

void write_trec_run(std::ostream& out, const std::string& topic, const run& r,
                    const std::string& tag) {
    for (std::size_t i = 0; i < r.size(); ++i) {
        out << topic << " Q0 " << r[i].doc << ' ' << (i + 1) << ' ' << format_score(r[i].score)
            << ' ' << tag << '\n';
    }
}

void write_trec_run_file(std::ostream& out, const run_file& rf, const std::string& tag) {
    for (const auto& topic : rf.topics) {
        write_trec_run(out, topic, rf.by_topic.at(topic), tag);
    }
}

run_file read_trec_run(std::istream& in) {
    run_file rf;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string topic, q0, doc, rank, score_text, tag;
        if (!(fields >> topic >> q0 >> doc >> rank >> score_text >> tag)) {
            throw data_error("run line " + std::to_string(lineno) + ": expected 6 columns");
        }
        double score = 0.0;
        try {
            score = std::stod(score_text);
        } catch (const std::exception&) {
            throw data_error("run line " + std::to_string(lineno) + ": bad score");
        }
        if (!rf.by_topic.count(topic)) {
            rf.topics.push_back(topic);
        }
        rf.by_topic[topic].push_back({doc, score});
    }
    return rf;
}

std::vector<query_record> read_queries(std::istream& in) {
    std::vector<query_record> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw data_error("query line " + std::to_string(lineno) +
                             ": expected topic_id<TAB>query text");
        }
        query_record rec;
        rec.topic = line.substr(0, tab);
        rec.text = line.substr(tab + 1);
        rec.terms = normalize(rec.text);
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<query_variation_set> read_clusters(std::istream& in) {
    std::vector<query_variation_set> clusters;
    std::unordered_map<std::string, std::size_t> index_of;
    for (auto& rec : read_queries(in)) {
        auto it = index_of.find(rec.topic);
        if (it == index_of.end()) {
            index_of.emplace(rec.topic, clusters.size());
            clusters.push_back({rec.topic, {std::move(rec.terms)}});
        } else {
            clusters[it->second].variations.push_back(std::move(rec.terms));
        }
    }
    return clusters;
}

std::string instance_key(const std::string& topic, std::size_t occurrence) {
    return topic + "#" + std::to_string(occurrence);
}

std::string topic_of_instance(const std::string& key) {
    const auto hash = key.find('#');
    return hash == std::string::npos ? key : key.substr(0, hash);
}

std::vector<std::string> instance_keys(const std::vector<query_record>& queries) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& q : queries) {
        ++counts[q.topic];
    }
    std::unordered_map<std::string, std::size_t> seen;
    std::vector<std::string> keys;
    keys.reserve(queries.size());
    for (const auto& q : queries) {
        if (counts[q.topic] == 1) {
            keys.push_back(q.topic);
        } else {
            keys.push_back(instance_key(q.topic, ++seen[q.topic]));
        }
    }
    return keys;
}

run combsum_runs(const std::vector<run>& lists, bool normalize) {
    if (lists.empty()) {
        throw data_error("combsum requires at least one input list");
    }
    std::unordered_map<std::string, double> sums;
    for (const auto& list : lists) {
        double lo = 0.0;
        double hi = 0.0;
        if (normalize && !list.empty()) {
            lo = hi = list.front().score;
            for (const auto& e : list) {
                lo = std::min(lo, e.score);
                hi = std::max(hi, e.score);
            }
        }
        for (const auto& e : list) {
            double s = e.score;
            if (normalize) {
                s = (hi == lo) ? 1.0 : (s - lo) / (hi - lo);
            }
            sums[e.doc] += s;
        }
    }
    run out;
    out.reserve(sums.size());
    for (const auto& [doc, score] : sums) {
        out.push_back({doc, score});
    }
    std::sort(out.begin(), out.end(), [](const run_entry& a, const run_entry& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.doc < b.doc;
    });
    return out;
}

}  // namespace qvfuse
