#ifndef TSGEN_MODEL_HPP
#define TSGEN_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tsgen/errors.hpp"

namespace tsgen {

enum class NodeKind { Discrete, Continuous };

struct NodeSpec {
    int id = 0;
    NodeKind kind = NodeKind::Discrete;
    std::optional<int> levels;  // present iff Discrete, K >= 2
    std::optional<std::string> name;

    bool operator==(const NodeSpec&) const = default;
};

// Parent reference with temporal lag. lag 0 is the same slice, lag k reads
// from slice t-k.
struct ParentRef {
    int node = 0;
    int lag = 0;

    bool operator==(const ParentRef&) const = default;
};

// Row-stochastic table, one row per mixed-radix configuration of the node's
// discrete parents, one column per child level.
struct DiscreteCpd {
    std::vector<std::vector<double>> table;

    bool operator==(const DiscreteCpd&) const = default;
};

struct GaussianRow {
    double mu = 0.0;
    double sigma = 1.0;

    bool operator==(const GaussianRow&) const = default;
};

// Per-configuration (mu, sigma) plus optional linear weights on continuous
// parents: mean = mu[row] + sum_j weights[j] * parent_value_j.
struct ConditionalGaussian {
    std::vector<GaussianRow> rows;
    std::vector<double> weights;  // one per continuous parent, may be empty

    bool operator==(const ConditionalGaussian&) const = default;
};

using Cpd = std::variant<DiscreteCpd, ConditionalGaussian>;

struct NodeCpd {
    std::vector<ParentRef> parents;  // order is significant for row indexing
    Cpd cpd;

    bool operator==(const NodeCpd&) const = default;
};

// CPDs for one epoch; entries indexed by node id.
struct EpochCpdSet {
    std::vector<NodeCpd> entries;

    bool operator==(const EpochCpdSet&) const = default;
};

// Epoch identifier: 0..lmax-1 are the startup epochs, kSteadyEpoch is the
// steady regime t >= lmax.
inline constexpr int kSteadyEpoch = -1;

struct NetworkSpec {
    std::vector<NodeSpec> nodes;       // D = nodes.size()
    std::vector<EpochCpdSet> epochs;   // one per epoch 0..lmax-1
    EpochCpdSet steady;

    int node_count() const { return static_cast<int>(nodes.size()); }

    // Maximum lag in any steady-epoch parent, floored at 1 so every network
    // has epoch 0 plus steady.
    int lmax() const;

    const EpochCpdSet& epoch_set(int epoch) const {
        return epoch == kSteadyEpoch ? steady : epochs.at(static_cast<size_t>(epoch));
    }

    bool operator==(const NetworkSpec&) const = default;
};

struct GenerationConfig {
    int t_len = 1;
    int n_samples = 1;
    std::uint64_t seed = 0;

    bool operator==(const GenerationConfig&) const = default;
};

// N x T x D cell values, flat row-major. Discrete cells hold the 1-based
// level as a double; continuous cells hold the real value.
struct Dataset {
    int n_samples = 0;
    int t_len = 0;
    int dim = 0;
    std::vector<double> values;

    double at(int sample, int t, int node) const {
        return values[(static_cast<size_t>(sample) * t_len + t) * dim + node];
    }
    double& at(int sample, int t, int node) {
        return values[(static_cast<size_t>(sample) * t_len + t) * dim + node];
    }

    bool operator==(const Dataset&) const = default;
};

struct Violation {
    std::string message;  // includes node/epoch/row location
    int node = -1;
    std::string epoch;  // "0", "1", ..., "steady", or "" when not epoch-scoped
    int row = -1;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool valid() const { return violations.empty(); }
};

std::string epoch_label(int epoch);

// Checks every structural invariant of the network: node id contiguity,
// levels presence, per-epoch lag bounds, CPD arity and stochasticity,
// sigma positivity, discrete-parents-only for discrete nodes, lag-0
// acyclicity, and epoch-count/lmax agreement. Violations are data, not
// exceptions; a valid spec yields an empty report.
ValidationReport validate_spec(const NetworkSpec& spec);

// Permutation of node ids with every lag-0 parent before its child, ties
// broken by ascending id. Throws CycleError naming the offending nodes.
std::vector<int> topo_order(const NetworkSpec& spec, int epoch);

// Mixed-radix row index, first value most significant; values are 1-based.
// Empty tuples map to row 0.
int parent_config_index(const std::vector<int>& values, const std::vector<int>& radices);

// Cardinality product of the discrete parents in `parents` (1 when none).
int cpd_row_count(const NetworkSpec& spec, const std::vector<ParentRef>& parents);

}  // namespace tsgen

#endif
