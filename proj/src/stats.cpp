#include "tsgen/stats.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "tsgen/sampler.hpp"

namespace tsgen {

namespace {

void check_shape(const Dataset& dataset, const NetworkSpec& spec) {
    if (dataset.dim != spec.node_count()) {
        throw StructureMismatch(fmt::format("dataset has {} columns, network has {} nodes",
                                            dataset.dim, spec.node_count()));
    }
    const size_t expected =
        static_cast<size_t>(dataset.n_samples) * dataset.t_len * dataset.dim;
    if (dataset.values.size() != expected) {
        throw StructureMismatch("dataset value buffer does not match its declared shape");
    }
}

// Mixed-radix parent configuration of `node` at (sample, t) under `entry`.
int config_at(const Dataset& dataset, const NetworkSpec& spec, const NodeCpd& entry,
              int sample, int t) {
    int index = 0;
    for (const ParentRef& p : entry.parents) {
        const NodeSpec& parent = spec.nodes[static_cast<size_t>(p.node)];
        if (parent.kind != NodeKind::Discrete) continue;
        const int value = static_cast<int>(dataset.at(sample, t - p.lag, p.node));
        if (value < 1 || value > *parent.levels) {
            throw StructureMismatch(fmt::format(
                "cell (sample {}, t {}, node {}) = {} outside 1..{}", sample,
                t - p.lag, p.node, value, *parent.levels));
        }
        index = index * *parent.levels + (value - 1);
    }
    return index;
}

}  // namespace

std::vector<std::vector<long long>> empirical_discrete(const Dataset& dataset,
                                                       const NetworkSpec& spec,
                                                       int node, int epoch) {
    check_shape(dataset, spec);
    const NodeSpec& node_spec = spec.nodes.at(static_cast<size_t>(node));
    if (node_spec.kind != NodeKind::Discrete) {
        throw StructureMismatch(fmt::format("node {} is not discrete", node));
    }
    const NodeCpd& entry = spec.epoch_set(epoch).entries[static_cast<size_t>(node)];
    const int rows = cpd_row_count(spec, entry.parents);
    const int k = *node_spec.levels;
    const int lmax = spec.lmax();
    std::vector<std::vector<long long>> counts(
        static_cast<size_t>(rows), std::vector<long long>(static_cast<size_t>(k), 0));
    for (int s = 0; s < dataset.n_samples; ++s) {
        for (int t = 0; t < dataset.t_len; ++t) {
            if (epoch_for(t, lmax) != epoch) continue;
            const int row = config_at(dataset, spec, entry, s, t);
            const int level = static_cast<int>(dataset.at(s, t, node));
            if (level < 1 || level > k) {
                throw StructureMismatch(fmt::format(
                    "cell (sample {}, t {}, node {}) = {} outside 1..{}", s, t, node,
                    level, k));
            }
            ++counts[static_cast<size_t>(row)][static_cast<size_t>(level - 1)];
        }
    }
    return counts;
}

ChiSquareResult chi_square_gof(const std::vector<long long>& observed,
                               const std::vector<double>& expected, long long total) {
    ChiSquareResult result;
    result.dof = static_cast<int>(observed.size()) - 1;
    for (double p : expected) {
        if (p * static_cast<double>(total) < 5.0) {
            result.skipped = true;
            return result;
        }
    }
    double stat = 0.0;
    for (size_t k = 0; k < observed.size(); ++k) {
        const double exp_count = expected[k] * static_cast<double>(total);
        const double diff = static_cast<double>(observed[k]) - exp_count;
        stat += diff * diff / exp_count;
    }
    result.statistic = stat;
    if (stat == 0.0) {
        result.p_value = 1.0;
        return result;
    }
    // Wilson-Hilferty: (X/k)^(1/3) is approximately normal
    const double k = static_cast<double>(result.dof);
    const double v = 2.0 / (9.0 * k);
    const double z = (std::cbrt(stat / k) - (1.0 - v)) / std::sqrt(v);
    result.p_value = 0.5 * std::erfc(z / std::numbers::sqrt2);
    return result;
}

MomentSummary gaussian_moments(const Dataset& dataset, const NetworkSpec& spec,
                               int node, int row) {
    check_shape(dataset, spec);
    if (spec.nodes.at(static_cast<size_t>(node)).kind != NodeKind::Continuous) {
        throw StructureMismatch(fmt::format("node {} is not continuous", node));
    }
    const int lmax = spec.lmax();
    long long n = 0;
    double sum = 0.0;
    double sumsq = 0.0;
    for (int s = 0; s < dataset.n_samples; ++s) {
        for (int t = 0; t < dataset.t_len; ++t) {
            const NodeCpd& entry =
                spec.epoch_set(epoch_for(t, lmax)).entries[static_cast<size_t>(node)];
            if (config_at(dataset, spec, entry, s, t) != row) continue;
            const double x = dataset.at(s, t, node);
            ++n;
            sum += x;
            sumsq += x * x;
        }
    }
    MomentSummary result;
    result.n = n;
    if (n >= 1) result.mean = sum / static_cast<double>(n);
    if (n >= 2) {
        const double mean = *result.mean;
        const double var =
            (sumsq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
        result.stddev = std::sqrt(std::max(var, 0.0));
    }
    return result;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    double kl = 0.0;
    for (size_t k = 0; k < p.size(); ++k) {
        if (p[k] == 0.0) continue;
        if (q[k] == 0.0) return std::numeric_limits<double>::infinity();
        kl += p[k] * std::log(p[k] / q[k]);
    }
    return kl;
}

bool StatsReport::all_pass() const {
    for (const DiscreteRowStats& row : discrete_rows) {
        if (!row.pass) return false;
    }
    return true;
}

StatsReport build_stats_report(const Dataset& dataset, const NetworkSpec& spec,
                               double alpha) {
    check_shape(dataset, spec);
    StatsReport report;
    report.alpha = alpha;
    const int lmax = spec.lmax();
    std::vector<int> epochs;
    for (int e = 0; e < lmax; ++e) {
        if (e < dataset.t_len) epochs.push_back(e);
    }
    if (dataset.t_len > lmax) epochs.push_back(kSteadyEpoch);

    for (int epoch : epochs) {
        const EpochCpdSet& set = spec.epoch_set(epoch);
        for (int node = 0; node < spec.node_count(); ++node) {
            const NodeCpd& entry = set.entries[static_cast<size_t>(node)];
            if (spec.nodes[static_cast<size_t>(node)].kind == NodeKind::Discrete) {
                const auto& cpd = std::get<DiscreteCpd>(entry.cpd);
                const auto counts = empirical_discrete(dataset, spec, node, epoch);
                for (size_t r = 0; r < counts.size(); ++r) {
                    DiscreteRowStats row;
                    row.node = node;
                    row.epoch = epoch_label(epoch);
                    row.row = static_cast<int>(r);
                    row.observed = counts[r];
                    row.expected_probs = cpd.table[r];
                    for (long long c : counts[r]) row.total += c;
                    if (row.total > 0) {
                        row.chi2 = chi_square_gof(row.observed, row.expected_probs, row.total);
                        std::vector<double> empirical(row.observed.size());
                        for (size_t k = 0; k < empirical.size(); ++k) {
                            empirical[k] = static_cast<double>(row.observed[k]) /
                                           static_cast<double>(row.total);
                        }
                        row.kl = kl_divergence(empirical, row.expected_probs);
                        row.pass = row.chi2.skipped || row.chi2.p_value >= alpha;
                    } else {
                        row.chi2.skipped = true;
                    }
                    report.discrete_rows.push_back(std::move(row));
                }
            } else {
                const auto& cpd = std::get<ConditionalGaussian>(entry.cpd);
                const int rows = cpd_row_count(spec, entry.parents);
                for (int r = 0; r < rows; ++r) {
                    ContinuousRowStats row;
                    row.node = node;
                    row.epoch = epoch_label(epoch);
                    row.row = r;
                    row.declared_mu = cpd.rows[static_cast<size_t>(r)].mu;
                    row.declared_sigma = cpd.rows[static_cast<size_t>(r)].sigma;
                    // restrict the moment scan to this epoch's timesteps
                    long long n = 0;
                    double sum = 0.0, sumsq = 0.0;
                    for (int s = 0; s < dataset.n_samples; ++s) {
                        for (int t = 0; t < dataset.t_len; ++t) {
                            if (epoch_for(t, lmax) != epoch) continue;
                            if (config_at(dataset, spec, entry, s, t) != r) continue;
                            const double x = dataset.at(s, t, node);
                            ++n;
                            sum += x;
                            sumsq += x * x;
                        }
                    }
                    row.n = n;
                    if (n >= 1) row.mean = sum / static_cast<double>(n);
                    if (n >= 2) {
                        const double mean = *row.mean;
                        const double var = (sumsq - static_cast<double>(n) * mean * mean) /
                                           static_cast<double>(n - 1);
                        row.stddev = std::sqrt(std::max(var, 0.0));
                    }
                    report.continuous_rows.push_back(std::move(row));
                }
            }
        }
    }
    return report;
}

std::string stats_report_to_json(const StatsReport& report) {
    nlohmann::ordered_json out;
    out["alpha"] = report.alpha;
    out["all_pass"] = report.all_pass();
    auto& discrete = out["discrete_rows"] = nlohmann::ordered_json::array();
    for (const DiscreteRowStats& row : report.discrete_rows) {
        nlohmann::ordered_json j = {{"node", row.node},   {"epoch", row.epoch},
                                    {"row", row.row},     {"observed", row.observed},
                                    {"expected", row.expected_probs},
                                    {"total", row.total}};
        if (row.chi2.skipped) {
            j["chi2"] = {{"skipped", true}};
        } else {
            j["chi2"] = {{"statistic", row.chi2.statistic},
                         {"dof", row.chi2.dof},
                         {"p_value", row.chi2.p_value}};
            j["kl"] = std::isinf(row.kl) ? nlohmann::ordered_json("inf")
                                         : nlohmann::ordered_json(row.kl);
        }
        j["pass"] = row.pass;
        discrete.push_back(std::move(j));
    }
    auto& continuous = out["continuous_rows"] = nlohmann::ordered_json::array();
    for (const ContinuousRowStats& row : report.continuous_rows) {
        nlohmann::ordered_json j = {{"node", row.node},
                                    {"epoch", row.epoch},
                                    {"row", row.row},
                                    {"n", row.n},
                                    {"declared_mu", row.declared_mu},
                                    {"declared_sigma", row.declared_sigma}};
        if (row.mean) j["mean"] = *row.mean;
        if (row.stddev) j["stddev"] = *row.stddev;
        continuous.push_back(std::move(j));
    }
    return out.dump(2) + "\n";
}

std::string stats_report_to_text(const StatsReport& report) {
    std::ostringstream oss;
    oss << fmt::format("alpha = {:g}\n", report.alpha);
    oss << "node  epoch   row  total    chi2       dof  p-value    KL         result\n";
    for (const DiscreteRowStats& row : report.discrete_rows) {
        if (row.chi2.skipped) {
            oss << fmt::format("{:<5} {:<7} {:<4} {:<8} {:<33} {}\n", row.node, row.epoch,
                               row.row, row.total, "-", "skipped (insufficient counts)");
        } else {
            oss << fmt::format("{:<5} {:<7} {:<4} {:<8} {:<10.4g} {:<4} {:<10.3g} {:<10.4g} {}\n",
                               row.node, row.epoch, row.row, row.total,
                               row.chi2.statistic, row.chi2.dof, row.chi2.p_value, row.kl,
                               row.pass ? "pass" : "FAIL");
        }
    }
    if (!report.continuous_rows.empty()) {
        oss << "node  epoch   row  n        mean       std        declared\n";
        for (const ContinuousRowStats& row : report.continuous_rows) {
            oss << fmt::format("{:<5} {:<7} {:<4} {:<8} {:<10} {:<10} mu={:g} sigma={:g}\n",
                               row.node, row.epoch, row.row, row.n,
                               row.mean ? fmt::format("{:.4g}", *row.mean) : "-",
                               row.stddev ? fmt::format("{:.4g}", *row.stddev) : "-",
                               row.declared_mu, row.declared_sigma);
        }
    }
    return oss.str();
}

}  // namespace tsgen
