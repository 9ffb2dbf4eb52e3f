#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "qvfuse/run_io.hpp"

namespace qvfuse {

/// Relevance judgments. Absence of a (topic, doc) pair means "unjudged",
/// which RBP residuals treat differently from an explicit grade of 0.
class qrels {
  public:
    void add(const std::string& topic, const std::string& doc, int grade);
    /// Grade for a judged pair, or -1 when the pair is unjudged.
    int grade(const std::string& topic, const std::string& doc) const;
    bool has_topic(const std::string& topic) const;
    /// All grades recorded for a topic (unordered).
    std::vector<int> grades(const std::string& topic) const;

    static qrels read(std::istream& in);

  private:
    std::unordered_map<std::string, std::unordered_map<std::string, int>> by_topic_;
};

struct metric_score {
    std::string topic;
    double value = 0.0;
    double residual = 0.0;  // always 0 for NDCG
    bool missing_judgments = false;
};

/// NDCG with exponential gain (2^grade - 1) and log2(rank + 1) discount,
/// cut off at depth k. Unjudged documents gain nothing.
metric_score ndcg_at_k(const run& r, const qrels& judgments, const std::string& topic,
                       std::size_t k = 10);

/// Rank-biased precision at persistence phi: value sums the weights of the
/// judged-relevant ranks, and the residual sums the weights of unjudged ranks
/// plus the whole unseen tail.
metric_score rbp(const run& r, const qrels& judgments, const std::string& topic,
                 double phi = 0.8);

struct wtl_counts {
    std::size_t wins = 0;
    std::size_t ties = 0;
    std::size_t losses = 0;
};

/// Win/tie/loss per query, with a multiplicative tie band around the
/// baseline: a tie is any score within band of the baseline score.
wtl_counts wtl(const std::vector<double>& system, const std::vector<double>& baseline,
               double band = 0.10);

/// Risk-adjusted per-query rewards: gains count once, losses (1 + alpha)
/// times. urisk is their mean.
double urisk(const std::vector<double>& system, const std::vector<double>& baseline, double alpha);

struct studentized_result {
    double value = 0.0;
    bool degenerate = false;  // zero variance: the statistic is undefined
};

/// Studentized urisk: mean(r) / (sd(r) / sqrt(n)). With alpha = 0 this is
/// exactly the paired t statistic.
studentized_result trisk(const std::vector<double>& system, const std::vector<double>& baseline,
                         double alpha);

struct t_test_result {
    double t = 0.0;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
    bool degenerate = false;
    bool significant_05 = false;   // p_adjusted < 0.05
    bool significant_001 = false;  // p_adjusted < 0.001
};

/// Two-sided paired t-test with Bonferroni correction over m comparisons.
t_test_result paired_t_bonferroni(const std::vector<double>& system,
                                  const std::vector<double>& baseline, std::size_t comparisons_m);

struct risk_report {
    std::vector<double> deltas;
    wtl_counts counts;
    double urisk_value = 0.0;
    studentized_result trisk_value;
    double alpha = 0.0;
    t_test_result t_test;
};

risk_report make_risk_report(const std::vector<double>& system,
                             const std::vector<double>& baseline, double alpha, double band,
                             std::size_t comparisons_m);

}  // namespace qvfuse
