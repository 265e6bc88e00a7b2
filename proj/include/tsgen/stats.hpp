#ifndef TSGEN_STATS_HPP
#define TSGEN_STATS_HPP

#include <optional>
#include <string>
#include <vector>

#include "tsgen/model.hpp"

namespace tsgen {

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    bool skipped = false;  // some expected count < 5, approximation invalid
};

struct DiscreteRowStats {
    int node = 0;
    std::string epoch;
    int row = 0;
    std::vector<long long> observed;
    std::vector<double> expected_probs;
    long long total = 0;
    ChiSquareResult chi2;
    double kl = 0.0;  // KL(empirical || declared), nats
    bool pass = true;
};

struct ContinuousRowStats {
    int node = 0;
    std::string epoch;
    int row = 0;
    long long n = 0;
    std::optional<double> mean;
    std::optional<double> stddev;  // unbiased
    double declared_mu = 0.0;
    double declared_sigma = 0.0;
};

struct StatsReport {
    double alpha = 0.01;
    std::vector<DiscreteRowStats> discrete_rows;
    std::vector<ContinuousRowStats> continuous_rows;

    bool all_pass() const;
};

// R x K counts of child level per parent configuration, over all (sample, t)
// pairs whose timestep maps to `epoch`.
std::vector<std::vector<long long>> empirical_discrete(const Dataset& dataset,
                                                       const NetworkSpec& spec,
                                                       int node, int epoch);

// Pearson goodness of fit with the Wilson-Hilferty cube-root normal p-value.
// Rows where any expected count is below 5 come back skipped, not thrown.
ChiSquareResult chi_square_gof(const std::vector<long long>& observed,
                               const std::vector<double>& expected, long long total);

struct MomentSummary {
    long long n = 0;
    std::optional<double> mean;
    std::optional<double> stddev;
};

// Sample mean and unbiased std of every cell of `node` whose discrete-parent
// configuration (under the epoch in effect at each t) equals `row`.
MomentSummary gaussian_moments(const Dataset& dataset, const NetworkSpec& spec,
                               int node, int row);

// KL(p || q) in nats; +infinity when q has a zero where p does not.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

StatsReport build_stats_report(const Dataset& dataset, const NetworkSpec& spec,
                               double alpha = 0.01);

std::string stats_report_to_json(const StatsReport& report);
std::string stats_report_to_text(const StatsReport& report);

}  // namespace tsgen

#endif
