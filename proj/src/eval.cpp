#include "qvfuse/eval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

namespace qvfuse {

void qrels::add(const std::string& topic, const std::string& doc, int grade) {
    if (grade < 0) {
        throw data_error("negative relevance grade for " + topic + "/" + doc);
    }
    by_topic_[topic][doc] = grade;
}

int qrels::grade(const std::string& topic, const std::string& doc) const {
    auto t = by_topic_.find(topic);
    if (t == by_topic_.end()) {
        return -1;
    }
    auto d = t->second.find(doc);
    return d == t->second.end() ? -1 : d->second;
}

bool qrels::has_topic(const std::string& topic) const {
    return by_topic_.count(topic) > 0;
}

std::vector<int> qrels::grades(const std::string& topic) const {
    std::vector<int> out;
    auto t = by_topic_.find(topic);
    if (t != by_topic_.end()) {
        out.reserve(t->second.size());
        for (const auto& [doc, grade] : t->second) {
            out.push_back(grade);
        }
    }
    return out;
}

qrels qrels::read(std::istream& in) {
    qrels q;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string topic, iteration, doc;
        int grade = 0;
        if (!(fields >> topic >> iteration >> doc >> grade)) {
            throw data_error("qrels line " + std::to_string(lineno) +
                             ": expected `topic 0 docid grade`");
        }
        q.add(topic, doc, grade);
    }
    return q;
}

metric_score ndcg_at_k(const run& r, const qrels& judgments, const std::string& topic,
                       std::size_t k) {
    if (k == 0) {
        throw config_error("ndcg cutoff must be at least 1");
    }
    metric_score score;
    score.topic = topic;
    if (!judgments.has_topic(topic)) {
        score.missing_judgments = true;
        return score;
    }
    double dcg = 0.0;
    const std::size_t depth = std::min(k, r.size());
    for (std::size_t i = 0; i < depth; ++i) {
        const int grade = judgments.grade(topic, r[i].doc);
        if (grade > 0) {
            dcg += (std::exp2(static_cast<double>(grade)) - 1.0) /
                   std::log2(static_cast<double>(i) + 2.0);
        }
    }
    auto grades = judgments.grades(topic);
    std::sort(grades.begin(), grades.end(), std::greater<>());
    double ideal = 0.0;
    for (std::size_t i = 0; i < std::min(k, grades.size()); ++i) {
        if (grades[i] > 0) {
            ideal += (std::exp2(static_cast<double>(grades[i])) - 1.0) /
                     std::log2(static_cast<double>(i) + 2.0);
        }
    }
    score.value = ideal > 0.0 ? dcg / ideal : 0.0;
    return score;
}

metric_score rbp(const run& r, const qrels& judgments, const std::string& topic, double phi) {
    if (!(phi > 0.0 && phi < 1.0)) {
        throw config_error("rbp persistence must lie strictly between 0 and 1");
    }
    metric_score score;
    score.topic = topic;
    if (!judgments.has_topic(topic)) {
        score.missing_judgments = true;
    }
    double weight = 1.0 - phi;  // (1 - phi) * phi^(i-1) at rank i
    for (const auto& entry : r) {
        const int grade = judgments.grade(topic, entry.doc);
        if (grade < 0) {
            score.residual += weight;
        } else if (grade >= 1) {
            score.value += weight;
        }
        weight *= phi;
    }
    // Unseen tail: everything past the end of the run is unknown.
    score.residual += std::pow(phi, static_cast<double>(r.size()));
    return score;
}

wtl_counts wtl(const std::vector<double>& system, const std::vector<double>& baseline,
               double band) {
    if (system.size() != baseline.size()) {
        throw data_error("wtl: score vectors differ in length");
    }
    wtl_counts counts;
    for (std::size_t i = 0; i < system.size(); ++i) {
        const double s = system[i];
        const double b = baseline[i];
        if (b == 0.0) {
            if (s > 0.0) {
                ++counts.wins;
            } else {
                ++counts.ties;
            }
        } else if (s > b * (1.0 + band)) {
            ++counts.wins;
        } else if (s < b * (1.0 - band)) {
            ++counts.losses;
        } else {
            ++counts.ties;
        }
    }
    return counts;
}

namespace {

std::vector<double> risk_rewards(const std::vector<double>& system,
                                 const std::vector<double>& baseline, double alpha) {
    if (system.size() != baseline.size()) {
        throw data_error("risk metrics: score vectors differ in length");
    }
    if (system.size() < 2) {
        throw data_error("risk metrics require at least 2 queries");
    }
    std::vector<double> rewards(system.size());
    for (std::size_t i = 0; i < system.size(); ++i) {
        const double delta = system[i] - baseline[i];
        rewards[i] = delta > 0.0 ? delta : (1.0 + alpha) * delta;
    }
    return rewards;
}

double mean_of(const std::vector<double>& v) {
    double sum = 0.0;
    for (const double x : v) {
        sum += x;
    }
    return sum / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v, double mean) {
    double sum_sq = 0.0;
    for (const double x : v) {
        sum_sq += (x - mean) * (x - mean);
    }
    return std::sqrt(sum_sq / static_cast<double>(v.size() - 1));
}

}  // namespace

double urisk(const std::vector<double>& system, const std::vector<double>& baseline,
             double alpha) {
    return mean_of(risk_rewards(system, baseline, alpha));
}

studentized_result trisk(const std::vector<double>& system, const std::vector<double>& baseline,
                         double alpha) {
    const auto rewards = risk_rewards(system, baseline, alpha);
    const double mean = mean_of(rewards);
    const double sd = sample_sd(rewards, mean);
    studentized_result result;
    if (sd == 0.0) {
        result.degenerate = true;
        return result;
    }
    result.value = mean / (sd / std::sqrt(static_cast<double>(rewards.size())));
    return result;
}

t_test_result paired_t_bonferroni(const std::vector<double>& system,
                                  const std::vector<double>& baseline,
                                  std::size_t comparisons_m) {
    if (comparisons_m == 0) {
        throw config_error("bonferroni comparison count must be at least 1");
    }
    if (system.size() != baseline.size()) {
        throw data_error("t-test: score vectors differ in length");
    }
    if (system.size() < 2) {
        throw data_error("t-test requires at least 2 queries");
    }
    std::vector<double> deltas(system.size());
    for (std::size_t i = 0; i < system.size(); ++i) {
        deltas[i] = system[i] - baseline[i];
    }
    const double mean = mean_of(deltas);
    const double sd = sample_sd(deltas, mean);
    t_test_result result;
    if (sd == 0.0) {
        result.degenerate = true;
        return result;
    }
    const double n = static_cast<double>(deltas.size());
    result.t = mean / (sd / std::sqrt(n));
    const boost::math::students_t dist(n - 1.0);
    result.p_raw = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(result.t)));
    result.p_adjusted = std::min(1.0, static_cast<double>(comparisons_m) * result.p_raw);
    result.significant_05 = result.p_adjusted < 0.05;
    result.significant_001 = result.p_adjusted < 0.001;
    return result;
}

risk_report make_risk_report(const std::vector<double>& system,
                             const std::vector<double>& baseline, double alpha, double band,
                             std::size_t comparisons_m) {
    risk_report report;
    report.alpha = alpha;
    report.deltas.resize(system.size());
    for (std::size_t i = 0; i < system.size(); ++i) {
        report.deltas[i] = system[i] - baseline[i];
    }
    report.counts = wtl(system, baseline, band);
    report.urisk_value = urisk(system, baseline, alpha);
    report.trisk_value = trisk(system, baseline, alpha);
    report.t_test = paired_t_bonferroni(system, baseline, comparisons_m);
    return report;
}

}  // namespace qvfuse
