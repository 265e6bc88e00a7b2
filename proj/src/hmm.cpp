#include "tsgen/hmm.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>

namespace tsgen {

namespace {

double log_normal_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace

HmmParams extract_hmm_params(const NetworkSpec& spec) {
    if (spec.node_count() != 2) {
        throw NotAnHmm(fmt::format("expected exactly 2 nodes, got {}", spec.node_count()));
    }
    const NodeSpec& hidden = spec.nodes[0];
    const NodeSpec& emission = spec.nodes[1];
    if (hidden.kind != NodeKind::Discrete) throw NotAnHmm("node 0 must be discrete");
    if (emission.kind != NodeKind::Continuous) throw NotAnHmm("node 1 must be continuous");
    if (spec.lmax() != 1) {
        throw NotAnHmm(fmt::format("expected loopback 1, got {}", spec.lmax()));
    }

    const NodeCpd& init = spec.epochs[0].entries[0];
    if (!init.parents.empty()) throw NotAnHmm("node 0 must be parentless at epoch 0");
    const NodeCpd& chain = spec.steady.entries[0];
    if (chain.parents.size() != 1 || chain.parents[0] != ParentRef{0, 1}) {
        throw NotAnHmm("node 0 must have the sole steady parent {node 0, lag 1}");
    }
    const ParentRef emit_parent{0, 0};
    for (const EpochCpdSet* set : {&spec.epochs[0], &spec.steady}) {
        const NodeCpd& e = set->entries[1];
        if (e.parents.size() != 1 || e.parents[0] != emit_parent) {
            throw NotAnHmm("node 1 must have the sole parent {node 0, lag 0}");
        }
    }
    const auto& emit0 = std::get<ConditionalGaussian>(spec.epochs[0].entries[1].cpd);
    const auto& emit1 = std::get<ConditionalGaussian>(spec.steady.entries[1].cpd);
    if (emit0.rows != emit1.rows) {
        throw NotAnHmm("emission CPD must be identical at epoch 0 and steady");
    }

    HmmParams params;
    params.pi = std::get<DiscreteCpd>(init.cpd).table[0];
    params.trans = std::get<DiscreteCpd>(chain.cpd).table;
    params.emit = emit0.rows;
    return params;
}

std::vector<int> viterbi(const HmmParams& params, const std::vector<double>& observations) {
    const int k = params.state_count();
    const int t_len = static_cast<int>(observations.size());
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();

    std::vector<std::vector<double>> delta(
        static_cast<size_t>(t_len), std::vector<double>(static_cast<size_t>(k)));
    std::vector<std::vector<int>> back(
        static_cast<size_t>(t_len), std::vector<int>(static_cast<size_t>(k), 0));

    for (int i = 0; i < k; ++i) {
        delta[0][i] = std::log(params.pi[i]) +
                      log_normal_pdf(observations[0], params.emit[i].mu, params.emit[i].sigma);
    }
    for (int t = 1; t < t_len; ++t) {
        for (int j = 0; j < k; ++j) {
            double best = kNegInf;
            int best_i = 0;
            for (int i = 0; i < k; ++i) {
                // strictly greater keeps ties on the lower previous index
                const double score = delta[t - 1][i] + std::log(params.trans[i][j]);
                if (score > best) {
                    best = score;
                    best_i = i;
                }
            }
            delta[t][j] = best + log_normal_pdf(observations[t], params.emit[j].mu,
                                                params.emit[j].sigma);
            back[t][j] = best_i;
        }
    }
    int state = 0;
    double best = kNegInf;
    for (int i = 0; i < k; ++i) {
        if (delta[t_len - 1][i] > best) {
            best = delta[t_len - 1][i];
            state = i;
        }
    }
    std::vector<int> path(static_cast<size_t>(t_len));
    for (int t = t_len - 1; t >= 0; --t) {
        path[static_cast<size_t>(t)] = state + 1;
        if (t > 0) state = back[t][state];
    }
    return path;
}

double forward_loglik(const HmmParams& params, const std::vector<double>& observations) {
    const int k = params.state_count();
    const int t_len = static_cast<int>(observations.size());
    std::vector<double> alpha(static_cast<size_t>(k));
    double loglik = 0.0;
    for (int i = 0; i < k; ++i) {
        alpha[i] = params.pi[i] * std::exp(log_normal_pdf(observations[0], params.emit[i].mu,
                                                          params.emit[i].sigma));
    }
    std::vector<double> next(static_cast<size_t>(k));
    for (int t = 0;; ++t) {
        double norm = 0.0;
        for (double a : alpha) norm += a;
        if (norm <= 0.0) return -std::numeric_limits<double>::infinity();
        loglik += std::log(norm);
        if (t == t_len - 1) break;
        for (double& a : alpha) a /= norm;
        for (int j = 0; j < k; ++j) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += alpha[i] * params.trans[i][j];
            next[j] = acc * std::exp(log_normal_pdf(observations[t + 1], params.emit[j].mu,
                                                    params.emit[j].sigma));
        }
        alpha.swap(next);
    }
    return loglik;
}

double decode_accuracy(const Dataset& dataset, const NetworkSpec& spec) {
    const HmmParams params = extract_hmm_params(spec);
    if (dataset.dim != 2) {
        throw StructureMismatch("dataset must have 2 columns for hmm evaluation");
    }
    double total = 0.0;
    std::vector<double> obs(static_cast<size_t>(dataset.t_len));
    for (int s = 0; s < dataset.n_samples; ++s) {
        for (int t = 0; t < dataset.t_len; ++t) obs[static_cast<size_t>(t)] = dataset.at(s, t, 1);
        const std::vector<int> path = viterbi(params, obs);
        int correct = 0;
        for (int t = 0; t < dataset.t_len; ++t) {
            if (path[static_cast<size_t>(t)] == static_cast<int>(dataset.at(s, t, 0))) {
                ++correct;
            }
        }
        total += static_cast<double>(correct) / dataset.t_len;
    }
    return total / dataset.n_samples;
}

}  // namespace tsgen
