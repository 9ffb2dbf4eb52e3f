#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "qvfuse/fusion.hpp"
#include "qvfuse/index.hpp"
#include "qvfuse/topk.hpp"

namespace qvfuse {

/// One entry of a ranked result keyed by external document identifier.
struct run_entry {
    std::string doc;
    double score;

    bool operator==(const run_entry&) const = default;
};

/// A ranked result in rank order (best first).
using run = std::vector<run_entry>;

/// Runs for many topics, preserving topic order of first appearance.
struct run_file {
    std::vector<std::string> topics;
    std::unordered_map<std::string, run> by_topic;

    void add(const std::string& topic, run r);
};

/// Convert an internal ranked list to an external run via the doc table.
run to_run(const ranked_list& list, const inverted_index& index);

/// TREC 6-column format: `topic Q0 docid rank score tag`.
void write_trec_run(std::ostream& out, const std::string& topic, const run& r,
                    const std::string& tag);
void write_trec_run_file(std::ostream& out, const run_file& rf, const std::string& tag);
run_file read_trec_run(std::istream& in);

/// Queries / variation clusters: `topic_id<TAB>query text`, one per line.
/// Repeated topic lines in a cluster file are duplicate variations.
struct query_record {
    std::string topic;
    std::string text;
    std::vector<std::string> terms;  // normalized
};

std::vector<query_record> read_queries(std::istream& in);
std::vector<query_variation_set> read_clusters(std::istream& in);

/// Instance keys distinguish multiple held-out queries of one topic inside a
/// single run file: the i-th repeat of topic T is written as "T#i". The part
/// before '#' is the topic used for judgment lookup.
std::string instance_key(const std::string& topic, std::size_t occurrence);
std::string topic_of_instance(const std::string& key);

/// Assign unique instance keys to a query sequence, in file order.
std::vector<std::string> instance_keys(const std::vector<query_record>& queries);

/// CombSUM over externally supplied runs (used for multi-run centroid
/// construction). Ties break by ascending docid string.
run combsum_runs(const std::vector<run>& lists, bool normalize = false);

std::string format_score(double value);

}  // namespace qvfuse
