#ifndef TSGEN_HMM_HPP
#define TSGEN_HMM_HPP

#include <vector>

#include "tsgen/model.hpp"

namespace tsgen {

struct HmmParams {
    std::vector<double> pi;                 // initial state distribution
    std::vector<std::vector<double>> trans; // K x K row-stochastic
    std::vector<GaussianRow> emit;          // per-state (mu, sigma)

    int state_count() const { return static_cast<int>(pi.size()); }
};

// Reads HMM parameters out of the two-node hidden-chain special case:
// node 0 discrete with a lag-1 self parent in steady, node 1 continuous
// emitting from node 0 at lag 0. Throws NotAnHmm naming the failed
// structural condition.
HmmParams extract_hmm_params(const NetworkSpec& spec);

// Most probable state path (1-based), log-space, ties toward the lower
// state index.
std::vector<int> viterbi(const HmmParams& params, const std::vector<double>& observations);

// log P(observations | params) via the scaled forward recursion.
double forward_loglik(const HmmParams& params, const std::vector<double>& observations);

// Mean per-timestep Viterbi state-recovery accuracy over all samples,
// decoding node 1 observations against the true node 0 states.
double decode_accuracy(const Dataset& dataset, const NetworkSpec& spec);

}  // namespace tsgen

#endif
