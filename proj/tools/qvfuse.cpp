#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qvfuse/centroid.hpp"
#include "qvfuse/common.hpp"
#include "qvfuse/eval.hpp"
#include "qvfuse/fusion.hpp"
#include "qvfuse/index.hpp"
#include "qvfuse/run_io.hpp"
#include "qvfuse/synthetic.hpp"
#include "qvfuse/timing.hpp"
#include "qvfuse/traversal.hpp"

namespace fs = std::filesystem;
using namespace qvfuse;

namespace {

struct app_config {
    double k1 = 0.9;
    double b = 0.4;
    std::uint32_t block_size = 40;
    std::size_t k = 10;
    std::size_t depth = kCentroidDepth;
    double delta = 0.5;
    double phi = 0.8;
    double alpha = 3.0;
    double band = 0.10;
    std::uint64_t seed = 42;
    std::size_t workers = 4;
};

void load_config_file(const std::string& path, app_config& cfg) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("cannot open config file: " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("bad config file " + path + ": " + e.what());
    }
    if (j.contains("k1")) cfg.k1 = j["k1"].get<double>();
    if (j.contains("b")) cfg.b = j["b"].get<double>();
    if (j.contains("block_size")) cfg.block_size = j["block_size"].get<std::uint32_t>();
    if (j.contains("k")) cfg.k = j["k"].get<std::size_t>();
    if (j.contains("depth")) cfg.depth = j["depth"].get<std::size_t>();
    if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
    if (j.contains("phi")) cfg.phi = j["phi"].get<double>();
    if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
    if (j.contains("band")) cfg.band = j["band"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<std::size_t>();
}

std::string config_header(const app_config& cfg,
                          const std::vector<std::pair<std::string, std::string>>& extra) {
    std::ostringstream out;
    out << "# qvfuse " << kVersion << "\n";
    out << "# config k1=" << format_score(cfg.k1) << " b=" << format_score(cfg.b)
        << " block_size=" << cfg.block_size << " k=" << cfg.k << " depth=" << cfg.depth
        << " delta=" << format_score(cfg.delta) << " phi=" << format_score(cfg.phi)
        << " alpha=" << format_score(cfg.alpha) << " band=" << format_score(cfg.band)
        << " seed=" << cfg.seed << "\n";
    for (const auto& [key, value] : extra) {
        out << "# " << key << "=" << value << "\n";
    }
    return out.str();
}

/// Compose output fully in memory, then write in one step so a failing
/// command never leaves a partial file behind.
void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw data_error("cannot write output file: " + path);
    }
    out << content;
    if (!out) {
        throw data_error("failed while writing: " + path);
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("cannot open input file: " + path);
    }
    return in;
}

inverted_index load_ready_index(const std::string& dir, const app_config& cfg) {
    auto index = inverted_index::load(dir);
    index.compute_upper_bounds({cfg.k1, cfg.b});
    index.compute_block_maxima(cfg.block_size);
    return index;
}

std::int64_t ns(std::chrono::nanoseconds d) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(d).count();
}

// --- subcommand bodies -------------------------------------------------------

void cmd_index_build(const app_config& cfg, const std::string& corpus_path,
                     const std::string& out_dir) {
    auto in = open_input(corpus_path);
    const auto index = inverted_index::build_tsv(in);
    index.save(out_dir);
    std::cerr << config_header(cfg, {{"corpus", corpus_path}, {"out", out_dir}});
    std::cerr << "# indexed docs=" << index.num_docs() << " terms=" << index.num_terms()
              << " tokens=" << index.stats().total_tokens << "\n";
}

void cmd_query_run(const app_config& cfg, const std::string& index_dir,
                   const std::string& queries_path, const std::string& strategy_name_str,
                   const std::string& out_path, const std::string& stats_path,
                   const std::string& tag) {
    const auto index = load_ready_index(index_dir, cfg);
    auto qin = open_input(queries_path);
    const auto queries = read_queries(qin);
    const auto keys = instance_keys(queries);
    const auto strat = strategy_from_name(strategy_name_str);

    std::ostringstream run_out;
    std::ostringstream stats_out;
    stats_out << config_header(cfg, {{"strategy", strategy_name_str}, {"queries", queries_path}});
    stats_out << "topic,strategy,postings,cpu_ns,wall_ns\n";
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const auto result = daat(index, weighted_query::from_terms(queries[i].terms), cfg.k, strat);
        write_trec_run(run_out, keys[i], to_run(result.top, index), tag);
        stats_out << keys[i] << ',' << strategy_name_str << ',' << result.stats.postings_scored
                  << ',' << ns(result.stats.cpu) << ',' << ns(result.stats.elapsed) << '\n';
    }
    write_file(out_path, run_out.str());
    if (!stats_path.empty()) {
        write_file(stats_path, stats_out.str());
    }
}

struct fuse_outcome {
    ranked_list fused;
    traversal_stats stats;
};

fuse_outcome run_fusion_mode(const inverted_index& index, const query_variation_set& cluster,
                             const std::string& mode, strategy strat, std::size_t k,
                             std::size_t workers) {
    fuse_outcome out;
    if (mode == "sp-cs") {
        auto r = sp_cs(index, cluster, k, strat);
        out.fused = std::move(r.top);
        out.stats = r.stats;
    } else if (mode == "sp-exhaustive") {
        auto r = sp_exhaustive(index, cluster, k);
        traversal_stats fuse_stats;
        {
            stats_timer timer(fuse_stats);
            out.fused = fuse_variation_lists(r);
        }
        out.stats = r.stats;
        out.stats.elapsed += fuse_stats.elapsed;
        out.stats.cpu += fuse_stats.cpu;
    } else if (mode == "pf") {
        auto r = pf(index, cluster, k, workers, strat);
        out.fused = std::move(r.fused);
        out.stats = r.stats;
    } else {
        throw config_error("unknown fusion mode: " + mode);
    }
    // The fused list covers every distinct document; callers truncate.
    if (out.fused.entries.size() > k) {
        out.fused.entries.resize(k);
    }
    return out;
}

void cmd_fuse(const app_config& cfg, const std::string& index_dir,
              const std::string& clusters_path, const std::string& mode,
              const std::string& strategy_name_str, const std::string& out_path,
              const std::string& stats_path, const std::string& tag) {
    const auto index = load_ready_index(index_dir, cfg);
    auto cin_file = open_input(clusters_path);
    const auto clusters = read_clusters(cin_file);
    const auto strat = strategy_from_name(strategy_name_str);

    std::ostringstream run_out;
    std::ostringstream stats_out;
    stats_out << config_header(cfg, {{"mode", mode}, {"strategy", strategy_name_str}});
    stats_out << "topic,strategy,variants,postings,cpu_ns,wall_ns\n";
    for (const auto& cluster : clusters) {
        const auto outcome = run_fusion_mode(index, cluster, mode, strat, cfg.k, cfg.workers);
        write_trec_run(run_out, cluster.topic, to_run(outcome.fused, index), tag);
        stats_out << cluster.topic << ',' << mode << '-' << strategy_name_str << ','
                  << cluster.variations.size() << ',' << outcome.stats.postings_scored << ','
                  << ns(outcome.stats.cpu) << ',' << ns(outcome.stats.elapsed) << '\n';
    }
    write_file(out_path, run_out.str());
    if (!stats_path.empty()) {
        write_file(stats_path, stats_out.str());
    }
}

void cmd_centroid_build(const app_config& cfg, const std::string& index_dir,
                        const std::string& clusters_path, const std::string& runs_dir,
                        const std::string& strategy_name_str, const std::string& out_path,
                        bool rank_only) {
    auto cin_file = open_input(clusters_path);
    const auto clusters = read_clusters(cin_file);
    centroid_store store;

    if (runs_dir.empty()) {
        const auto index = load_ready_index(index_dir, cfg);
        const auto strat = strategy_from_name(strategy_name_str);
        for (const auto& cluster : clusters) {
            store.add(build_centroid(index, cluster, cfg.depth, strat));
        }
    } else {
        // Double fusion: CombSUM across every supplied per-system,
        // per-variation ranked list belonging to the cluster's topic.
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(runs_dir)) {
            if (entry.is_regular_file()) {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            throw data_error("no run files found in: " + runs_dir);
        }
        std::vector<run_file> run_files;
        run_files.reserve(files.size());
        for (const auto& f : files) {
            auto rin = open_input(f.string());
            run_files.push_back(read_trec_run(rin));
        }
        for (const auto& cluster : clusters) {
            std::vector<run> lists;
            for (const auto& rf : run_files) {
                for (const auto& topic : rf.topics) {
                    if (topic_of_instance(topic) == cluster.topic) {
                        lists.push_back(rf.by_topic.at(topic));
                    }
                }
            }
            if (lists.empty()) {
                throw data_error("no run lists found for cluster: " + cluster.topic);
            }
            store.add(build_centroid_multirun(cluster.topic, lists, cfg.depth));
        }
    }
    store.save(out_path, rank_only);
    std::cerr << config_header(cfg, {{"clusters", clusters_path},
                                     {"out", out_path},
                                     {"mode", runs_dir.empty() ? "sp-cs" : "multi-run"}});
}

run boost_one(const inverted_index& index, const centroid_entry& c, const run& query_run,
              const std::string& method, double delta, std::size_t k) {
    if (method == "interleave") {
        return interleave(c, query_run, k);
    }
    if (method == "lc") {
        return linear_combination(c, query_run, delta, k);
    }
    if (method == "ref-reorder") {
        return ref_reorder(c, query_run, k);
    }
    if (method == "rcc") {
        return rcc(c, k);
    }
    throw config_error("unknown boosting method: " + method);
}

void cmd_boost(const app_config& cfg, const std::string& index_dir,
               const std::string& centroids_path, const std::string& queries_path,
               const std::string& method, double epsilon, std::size_t trials,
               const std::string& out_path, const std::string& assignments_path,
               bool dump_assignments, const std::string& strategy_name_str,
               const std::string& tag) {
    const auto index = load_ready_index(index_dir, cfg);
    const auto store = centroid_store::load(centroids_path);
    auto qin = open_input(queries_path);
    const auto queries = read_queries(qin);
    const auto keys = instance_keys(queries);
    const auto strat = strategy_from_name(strategy_name_str);

    std::vector<std::string> cluster_ids;
    cluster_ids.reserve(store.entries().size());
    for (const auto& e : store.entries()) {
        cluster_ids.push_back(e.cluster_id);
    }

    // The true assignment maps each query instance to its own topic cluster.
    std::vector<assignment> truth(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        truth[i] = {keys[i], queries[i].topic};
    }

    // Query runs do not depend on the assignment; compute them once.
    std::vector<run> query_runs(queries.size());
    if (method != "rcc") {
        for (std::size_t i = 0; i < queries.size(); ++i) {
            query_runs[i] =
                to_run(daat(index, weighted_query::from_terms(queries[i].terms), cfg.k, strat).top,
                       index);
        }
    }

    auto boosted_run_text = [&](const std::vector<assignment>& assignments) {
        std::ostringstream out;
        for (std::size_t i = 0; i < queries.size(); ++i) {
            const auto* c = store.find(assignments[i].cluster_id);
            run result;
            if (c == nullptr) {
                // No matched centroid: fall back to the plain query run.
                result = method == "rcc"
                             ? to_run(daat(index,
                                           weighted_query::from_terms(queries[i].terms), cfg.k,
                                           strat)
                                          .top,
                                      index)
                             : query_runs[i];
                if (result.size() > cfg.k) {
                    result.resize(cfg.k);
                }
            } else {
                result = boost_one(index, *c, query_runs[i], method, cfg.delta, cfg.k);
            }
            write_trec_run(out, keys[i], result, tag);
        }
        return out.str();
    };

    if (!assignments_path.empty()) {
        auto ain = open_input(assignments_path);
        const auto given = read_assignments(ain);
        if (given.size() != queries.size()) {
            throw data_error("assignment file does not cover the query file");
        }
        write_file(out_path, boosted_run_text(given));
        return;
    }

    if (epsilon == 0.0) {
        write_file(out_path, boosted_run_text(truth));
        return;
    }

    rng master(cfg.seed);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const auto trial_seed = master.next_u64();
        const auto noisy = inject_error(truth, cluster_ids, epsilon, trial_seed);
        const auto trial_path = out_path + ".t" + std::to_string(trial);
        write_file(trial_path, boosted_run_text(noisy));
        if (dump_assignments) {
            std::ostringstream aout;
            write_assignments(aout, noisy);
            write_file(trial_path + ".assign", aout.str());
        }
    }
}

void cmd_match(const app_config& cfg, const std::string& queries_path,
               const std::string& clusters_path, std::size_t distractors, double overlap,
               const std::string& out_path) {
    auto qin = open_input(queries_path);
    const auto queries = read_queries(qin);
    auto cin_file = open_input(clusters_path);
    auto clusters = read_clusters(cin_file);
    const std::size_t true_clusters = clusters.size();

    if (distractors > 0) {
        distractor_params params;
        params.clusters = distractors;
        params.overlap_probability = overlap;
        const auto pool = cluster_vocabulary(clusters);
        auto noise = make_distractor_clusters(params, pool, cfg.seed);
        clusters.insert(clusters.end(), std::make_move_iterator(noise.begin()),
                        std::make_move_iterator(noise.end()));
    }
    const auto pseudo = build_pseudo_index(clusters, {cfg.k1, cfg.b});

    std::ostringstream out;
    out << config_header(cfg, {{"distractors", std::to_string(distractors)},
                               {"overlap", format_score(overlap)},
                               {"true_clusters", std::to_string(true_clusters)}});
    out << "query,topic,matched,score,success\n";
    std::size_t successes = 0;
    const auto keys = instance_keys(queries);
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const auto match = match_cluster(queries[i].terms, pseudo);
        const bool success = match.cluster_id && *match.cluster_id == queries[i].topic;
        successes += success ? 1 : 0;
        out << keys[i] << ',' << queries[i].topic << ','
            << (match.cluster_id ? *match.cluster_id : std::string("none")) << ','
            << format_score(match.score) << ',' << (success ? 1 : 0) << '\n';
    }
    const double rate =
        queries.empty() ? 0.0 : static_cast<double>(successes) / static_cast<double>(queries.size());
    out << "summary,success_rate," << format_score(rate) << ",,\n";
    write_file(out_path, out.str());
    std::cout << "match success rate: " << format_score(rate) << " (" << successes << "/"
              << queries.size() << ")\n";
}

void cmd_eval(const app_config& cfg, const std::string& run_path, const std::string& baseline_path,
              const std::string& qrels_path, const std::string& metric, std::size_t bonferroni_m,
              const std::string& out_path) {
    auto rin = open_input(run_path);
    const auto system_runs = read_trec_run(rin);
    auto bin = open_input(baseline_path);
    const auto baseline_runs = read_trec_run(bin);
    auto qin = open_input(qrels_path);
    const auto judgments = qrels::read(qin);

    auto score_one = [&](const run& r, const std::string& topic) {
        const auto base_topic = topic_of_instance(topic);
        if (metric == "ndcg@10") {
            return ndcg_at_k(r, judgments, base_topic, 10);
        }
        if (metric == "rbp") {
            return rbp(r, judgments, base_topic, cfg.phi);
        }
        throw config_error("unknown metric: " + metric);
    };

    std::ostringstream out;
    out << config_header(cfg, {{"metric", metric},
                               {"run", run_path},
                               {"baseline", baseline_path},
                               {"bonferroni_m", std::to_string(bonferroni_m)}});
    out << "topic,metric,value,residual\n";
    std::vector<double> system_scores;
    std::vector<double> baseline_scores;
    double value_sum = 0.0;
    double residual_sum = 0.0;
    for (const auto& topic : system_runs.topics) {
        const auto it = baseline_runs.by_topic.find(topic);
        if (it == baseline_runs.by_topic.end()) {
            throw data_error("baseline run is missing topic: " + topic);
        }
        const auto sys = score_one(system_runs.by_topic.at(topic), topic);
        const auto base = score_one(it->second, topic);
        system_scores.push_back(sys.value);
        baseline_scores.push_back(base.value);
        value_sum += sys.value;
        residual_sum += sys.residual;
        out << topic << ',' << metric << ',' << format_score(sys.value) << ','
            << format_score(sys.residual) << '\n';
    }
    if (system_scores.empty()) {
        throw data_error("run file contains no topics: " + run_path);
    }

    const double n = static_cast<double>(system_scores.size());
    out << "summary,mean_value," << format_score(value_sum / n) << ",\n";
    out << "summary,mean_residual," << format_score(residual_sum / n) << ",\n";
    if (system_scores.size() >= 2) {
        const auto report =
            make_risk_report(system_scores, baseline_scores, cfg.alpha, cfg.band, bonferroni_m);
        out << "summary,wins," << report.counts.wins << ",\n";
        out << "summary,ties," << report.counts.ties << ",\n";
        out << "summary,losses," << report.counts.losses << ",\n";
        out << "summary,urisk," << format_score(report.urisk_value) << ",\n";
        out << "summary,trisk,"
            << (report.trisk_value.degenerate ? std::string("degenerate")
                                              : format_score(report.trisk_value.value))
            << ",\n";
        out << "summary,t,"
            << (report.t_test.degenerate ? std::string("degenerate")
                                         : format_score(report.t_test.t))
            << ",\n";
        out << "summary,p_raw,"
            << (report.t_test.degenerate ? std::string("degenerate")
                                         : format_score(report.t_test.p_raw))
            << ",\n";
        out << "summary,p_adjusted,"
            << (report.t_test.degenerate ? std::string("degenerate")
                                         : format_score(report.t_test.p_adjusted))
            << ",\n";
        const std::string sig = report.t_test.degenerate ? "none"
                                : report.t_test.significant_001
                                    ? "p<0.001"
                                    : (report.t_test.significant_05 ? "p<0.05" : "none");
        out << "summary,significance," << sig << ",\n";
    }
    write_file(out_path, out.str());
}

void cmd_bench(const app_config& cfg, const std::string& index_dir,
               const std::string& clusters_path, const std::string& sweep_text,
               const std::string& modes_text, std::size_t reps, const std::string& out_path) {
    const auto index = load_ready_index(index_dir, cfg);
    auto cin_file = open_input(clusters_path);
    const auto clusters = read_clusters(cin_file);

    std::vector<std::size_t> sweep;
    {
        std::istringstream ss(sweep_text);
        std::string token;
        while (std::getline(ss, token, ',')) {
            sweep.push_back(std::stoull(token));
        }
    }
    std::vector<std::string> modes;
    {
        std::istringstream ss(modes_text);
        std::string token;
        while (std::getline(ss, token, ',')) {
            modes.push_back(token);
        }
    }

    auto run_mode = [&](const std::string& mode, const query_variation_set& sample) {
        if (mode == "sp-exhaustive") {
            return run_fusion_mode(index, sample, "sp-exhaustive", strategy::exhaustive, cfg.k,
                                   cfg.workers);
        }
        if (mode.starts_with("sp-cs-")) {
            return run_fusion_mode(index, sample, "sp-cs", strategy_from_name(mode.substr(6)),
                                   cfg.k, cfg.workers);
        }
        if (mode.starts_with("pf-")) {
            return run_fusion_mode(index, sample, "pf", strategy_from_name(mode.substr(3)), cfg.k,
                                   cfg.workers);
        }
        throw config_error("unknown bench mode: " + mode);
    };

    std::ostringstream out;
    out << config_header(cfg, {{"reps", std::to_string(reps)},
                               {"sweep", sweep_text},
                               {"modes", modes_text}});
    out << "topic,strategy,variants,postings,cpu_ns,wall_ns\n";
    for (const auto& cluster : clusters) {
        for (const auto m : sweep) {
            // Incremental sampling: the same seeds drive every mode so that
            // all modes see identical sampled variation sets.
            std::vector<std::uint64_t> rep_seeds(reps);
            rng master(cfg.seed);
            for (auto& s : rep_seeds) {
                s = master.next_u64();
            }
            for (const auto& mode : modes) {
                double postings = 0.0;
                double cpu = 0.0;
                double wall = 0.0;
                for (std::size_t rep = 0; rep < reps; ++rep) {
                    const auto sample = sample_variants(cluster, m, rep_seeds[rep]);
                    const auto outcome = run_mode(mode, sample);
                    postings += static_cast<double>(outcome.stats.postings_scored);
                    cpu += static_cast<double>(ns(outcome.stats.cpu));
                    wall += static_cast<double>(ns(outcome.stats.elapsed));
                }
                const double r = static_cast<double>(reps);
                out << cluster.topic << ',' << mode << ',' << m << ','
                    << format_score(postings / r) << ',' << format_score(cpu / r) << ','
                    << format_score(wall / r) << '\n';
            }
        }
    }
    write_file(out_path, out.str());
}

}  // namespace

int main(int argc, char** argv) {
    app_config cfg;

    // --config is applied before the remaining flags so that explicit flags
    // override file values, which override the built-in defaults.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string_view(argv[i]) == "--config") {
            try {
                load_config_file(argv[i + 1], cfg);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 2;
            }
        }
    }

    CLI::App app{"query-variation fusion engine"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (flags override file values)");
    app.add_option("--k1", cfg.k1, "BM25 k1")->capture_default_str();
    app.add_option("--b", cfg.b, "BM25 b")->capture_default_str();
    app.add_option("--block-size", cfg.block_size, "block-max block size")->capture_default_str();
    app.add_option("--seed", cfg.seed, "master random seed")->capture_default_str();
    app.add_option("--workers", cfg.workers, "worker pool size")->capture_default_str();

    // index-build
    std::string corpus_path, index_dir;
    auto* build = app.add_subcommand("index-build", "build an index from a TSV corpus");
    build->add_option("corpus", corpus_path, "docid<TAB>text corpus file")->required();
    build->add_option("out", index_dir, "output index directory")->required();

    // query-run
    std::string queries_path, out_path, stats_path, strategy_opt = "maxscore", tag = "qvfuse";
    auto* qrun = app.add_subcommand("query-run", "evaluate plain queries to a TREC run");
    qrun->add_option("index", index_dir, "index directory")->required();
    qrun->add_option("queries", queries_path, "topic_id<TAB>query file")->required();
    qrun->add_option("--strategy", strategy_opt, "exhaustive|maxscore|wand|bmw")
        ->capture_default_str();
    qrun->add_option("--k", cfg.k, "result depth")->capture_default_str();
    qrun->add_option("--out", out_path, "TREC run output")->required();
    qrun->add_option("--stats", stats_path, "per-query cost CSV");
    qrun->add_option("--tag", tag, "run tag")->capture_default_str();

    // fuse
    std::string clusters_path, mode = "sp-cs";
    auto* fuse = app.add_subcommand("fuse", "fuse query variation clusters into one run");
    fuse->add_option("index", index_dir, "index directory")->required();
    fuse->add_option("clusters", clusters_path, "variation cluster file")->required();
    fuse->add_option("--mode", mode, "pf|sp-exhaustive|sp-cs")->capture_default_str();
    fuse->add_option("--strategy", strategy_opt, "traversal strategy")->capture_default_str();
    fuse->add_option("--k", cfg.k, "result depth")->capture_default_str();
    fuse->add_option("--out", out_path, "TREC run output")->required();
    fuse->add_option("--stats", stats_path, "per-topic cost CSV");
    fuse->add_option("--tag", tag, "run tag")->capture_default_str();

    // centroid-build
    std::string runs_dir, centroids_path;
    bool rank_only = false;
    auto* cbuild = app.add_subcommand("centroid-build", "precompute cluster centroids");
    cbuild->add_option("index", index_dir, "index directory")->required();
    cbuild->add_option("clusters", clusters_path, "variation cluster file")->required();
    cbuild->add_option("--depth", cfg.depth, "centroid depth")->capture_default_str();
    cbuild->add_option("--strategy", strategy_opt, "traversal strategy")->capture_default_str();
    cbuild->add_option("--runs", runs_dir, "directory of runs for multi-run fusion");
    cbuild->add_option("--out", centroids_path, "centroid store output")->required();
    cbuild->add_flag("--rank-only", rank_only, "store ranks without scores");

    // boost
    std::string method = "rcc", assignments_path;
    double epsilon = 0.0;
    std::size_t trials = 10;
    bool dump_assignments = false;
    auto* boost = app.add_subcommand("boost", "combine centroids with per-query runs");
    boost->add_option("index", index_dir, "index directory")->required();
    boost->add_option("centroids", centroids_path, "centroid store")->required();
    boost->add_option("queries", queries_path, "held-out query file")->required();
    boost->add_option("--method", method, "interleave|lc|ref-reorder|rcc")->capture_default_str();
    boost->add_option("--delta", cfg.delta, "centroid weight for lc")->capture_default_str();
    boost->add_option("--k", cfg.k, "result depth")->capture_default_str();
    boost->add_option("--strategy", strategy_opt, "traversal strategy")->capture_default_str();
    boost->add_option("--epsilon", epsilon, "misassignment probability")->capture_default_str();
    boost->add_option("--trials", trials, "trials when epsilon > 0")->capture_default_str();
    boost->add_option("--assignments", assignments_path, "explicit query->cluster assignments");
    boost->add_flag("--dump-assignments", dump_assignments, "write per-trial assignment files");
    boost->add_option("--out", out_path, "run output (suffix .t<i> per trial)")->required();
    boost->add_option("--tag", tag, "run tag")->capture_default_str();

    // match
    std::size_t distractors = 0;
    double overlap = 0.0;
    auto* match = app.add_subcommand("match", "match queries against cluster pseudo-documents");
    match->add_option("queries", queries_path, "held-out query file")->required();
    match->add_option("clusters", clusters_path, "variation cluster file")->required();
    match->add_option("--distractors", distractors, "synthetic distractor clusters")
        ->capture_default_str();
    match->add_option("--overlap", overlap, "distractor vocabulary overlap probability")
        ->capture_default_str();
    match->add_option("--out", out_path, "per-query match CSV")->required();

    // eval
    std::string run_path, baseline_path, qrels_path, metric = "ndcg@10";
    std::size_t bonferroni_m = 1;
    auto* eval = app.add_subcommand("eval", "score a run against a baseline");
    eval->add_option("run", run_path, "system TREC run")->required();
    eval->add_option("baseline", baseline_path, "baseline TREC run")->required();
    eval->add_option("qrels", qrels_path, "TREC qrels")->required();
    eval->add_option("--metric", metric, "ndcg@10|rbp")->capture_default_str();
    eval->add_option("--phi", cfg.phi, "RBP persistence")->capture_default_str();
    eval->add_option("--alpha", cfg.alpha, "risk loss weight")->capture_default_str();
    eval->add_option("--band", cfg.band, "win/tie/loss band")->capture_default_str();
    eval->add_option("--bonferroni", bonferroni_m, "comparisons for correction")
        ->capture_default_str();
    eval->add_option("--out", out_path, "report CSV")->required();

    // bench
    std::string sweep_text = "1,2,5,10,20,50,100";
    std::string modes_text = "sp-cs-maxscore,sp-cs-wand,sp-cs-bmw,sp-exhaustive,pf-exhaustive";
    std::size_t reps = 10;
    auto* bench = app.add_subcommand("bench", "cost vs. number of fused variants");
    bench->add_option("index", index_dir, "index directory")->required();
    bench->add_option("clusters", clusters_path, "variation cluster file")->required();
    bench->add_option("--sweep", sweep_text, "comma-separated variant counts")
        ->capture_default_str();
    bench->add_option("--modes", modes_text, "comma-separated fusion modes")
        ->capture_default_str();
    bench->add_option("--reps", reps, "repetitions per point")->capture_default_str();
    bench->add_option("--k", cfg.k, "result depth")->capture_default_str();
    bench->add_option("--out", out_path, "cost CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            cmd_index_build(cfg, corpus_path, index_dir);
        } else if (qrun->parsed()) {
            cmd_query_run(cfg, index_dir, queries_path, strategy_opt, out_path, stats_path, tag);
        } else if (fuse->parsed()) {
            cmd_fuse(cfg, index_dir, clusters_path, mode, strategy_opt, out_path, stats_path, tag);
        } else if (cbuild->parsed()) {
            cmd_centroid_build(cfg, index_dir, clusters_path, runs_dir, strategy_opt,
                               centroids_path, rank_only);
        } else if (boost->parsed()) {
            cmd_boost(cfg, index_dir, centroids_path, queries_path, method, epsilon, trials,
                      out_path, assignments_path, dump_assignments, strategy_opt, tag);
        } else if (match->parsed()) {
            cmd_match(cfg, queries_path, clusters_path, distractors, overlap, out_path);
        } else if (eval->parsed()) {
            cmd_eval(cfg, run_path, baseline_path, qrels_path, metric, bonferroni_m, out_path);
        } else if (bench->parsed()) {
            cmd_bench(cfg, index_dir, clusters_path, sweep_text, modes_text, reps, out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
