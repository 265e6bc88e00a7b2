#include "tsgen/model.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <queue>
#include <sstream>

namespace tsgen {

namespace {

constexpr double kRowSumTol = 1e-9;

void add(ValidationReport& report, std::string msg, int node = -1,
         std::string epoch = "", int row = -1) {
    report.violations.push_back({std::move(msg), node, std::move(epoch), row});
}

bool node_is_discrete(const NetworkSpec& spec, int id) {
    return spec.nodes[static_cast<size_t>(id)].kind == NodeKind::Discrete;
}

void check_epoch(const NetworkSpec& spec, const EpochCpdSet& set, int epoch,
                 ValidationReport& report) {
    const std::string label = epoch_label(epoch);
    const int d = spec.node_count();
    if (static_cast<int>(set.entries.size()) != d) {
        add(report,
            fmt::format("epoch {}: expected {} node entries, found {}", label, d,
                        set.entries.size()),
            -1, label);
        return;
    }
    const int max_lag = epoch == kSteadyEpoch ? spec.lmax() : epoch;
    for (int id = 0; id < d; ++id) {
        const NodeCpd& entry = set.entries[static_cast<size_t>(id)];
        const NodeSpec& node = spec.nodes[static_cast<size_t>(id)];
        bool parents_ok = true;
        for (const ParentRef& p : entry.parents) {
            if (p.node < 0 || p.node >= d) {
                add(report,
                    fmt::format("epoch {}: node {} references unknown parent {}",
                                label, id, p.node),
                    id, label);
                parents_ok = false;
                continue;
            }
            if (p.lag < 0) {
                add(report,
                    fmt::format("epoch {}: node {} has negative lag {}", label, id, p.lag),
                    id, label);
                parents_ok = false;
            } else if (p.lag > max_lag) {
                add(report,
                    fmt::format("epoch {}: node {} parent {} has lag {} > {}",
                                label, id, p.node, p.lag, max_lag),
                    id, label);
                parents_ok = false;
            }
            if (node.kind == NodeKind::Discrete && p.node >= 0 && p.node < d &&
                !node_is_discrete(spec, p.node)) {
                add(report,
                    fmt::format("epoch {}: discrete node {} has continuous parent {}",
                                label, id, p.node),
                    id, label);
                parents_ok = false;
            }
        }
        const int expected_rows = parents_ok ? cpd_row_count(spec, entry.parents) : -1;

        if (node.kind == NodeKind::Discrete) {
            const auto* cpd = std::get_if<DiscreteCpd>(&entry.cpd);
            if (cpd == nullptr) {
                add(report,
                    fmt::format("epoch {}: discrete node {} has a Gaussian CPD", label, id),
                    id, label);
                continue;
            }
            const int k = node.levels.value_or(0);
            if (expected_rows >= 0 &&
                static_cast<int>(cpd->table.size()) != expected_rows) {
                add(report,
                    fmt::format("epoch {}: node {} CPD has {} rows, expected {}",
                                label, id, cpd->table.size(), expected_rows),
                    id, label);
            }
            for (int r = 0; r < static_cast<int>(cpd->table.size()); ++r) {
                const auto& row = cpd->table[static_cast<size_t>(r)];
                if (static_cast<int>(row.size()) != k) {
                    add(report,
                        fmt::format(
                            "epoch {}: node {} row {} has {} entries, expected {} levels",
                            label, id, r, row.size(), k),
                        id, label, r);
                    continue;
                }
                double sum = 0.0;
                bool nonneg = true;
                for (double p : row) {
                    if (p < 0.0 || !std::isfinite(p)) nonneg = false;
                    sum += p;
                }
                if (!nonneg) {
                    add(report,
                        fmt::format("epoch {}: node {} row {} has a negative entry",
                                    label, id, r),
                        id, label, r);
                }
                if (std::abs(sum - 1.0) > kRowSumTol) {
                    add(report,
                        fmt::format("epoch {}: node {} row {}: row sum {:g} != 1",
                                    label, id, r, sum),
                        id, label, r);
                }
            }
        } else {
            const auto* cpd = std::get_if<ConditionalGaussian>(&entry.cpd);
            if (cpd == nullptr) {
                add(report,
                    fmt::format("epoch {}: continuous node {} has a discrete CPD",
                                label, id),
                    id, label);
                continue;
            }
            if (expected_rows >= 0 &&
                static_cast<int>(cpd->rows.size()) != expected_rows) {
                add(report,
                    fmt::format("epoch {}: node {} CPD has {} rows, expected {}",
                                label, id, cpd->rows.size(), expected_rows),
                    id, label);
            }
            for (int r = 0; r < static_cast<int>(cpd->rows.size()); ++r) {
                const GaussianRow& g = cpd->rows[static_cast<size_t>(r)];
                if (!(g.sigma > 0.0) || !std::isfinite(g.sigma)) {
                    add(report,
                        fmt::format("epoch {}: node {} row {}: sigma must be > 0, got {:g}",
                                    label, id, r, g.sigma),
                        id, label, r);
                }
                if (!std::isfinite(g.mu)) {
                    add(report,
                        fmt::format("epoch {}: node {} row {}: mu is not finite",
                                    label, id, r),
                        id, label, r);
                }
            }
            size_t cont_parents = 0;
            for (const ParentRef& p : entry.parents) {
                if (p.node >= 0 && p.node < d && !node_is_discrete(spec, p.node)) {
                    ++cont_parents;
                }
            }
            if (!cpd->weights.empty() && cpd->weights.size() != cont_parents) {
                add(report,
                    fmt::format(
                        "epoch {}: node {} has {} weights for {} continuous parents",
                        label, id, cpd->weights.size(), cont_parents),
                    id, label);
            }
        }
    }
    // lag-0 acyclicity
    try {
        topo_order(spec, epoch);
    } catch (const CycleError& e) {
        add(report, fmt::format("epoch {}: {}", label, e.what()), -1, label);
    }
}

}  // namespace

std::string epoch_label(int epoch) {
    return epoch == kSteadyEpoch ? "steady" : std::to_string(epoch);
}

int NetworkSpec::lmax() const {
    int m = 1;
    for (const NodeCpd& entry : steady.entries) {
        for (const ParentRef& p : entry.parents) m = std::max(m, p.lag);
    }
    return m;
}

int cpd_row_count(const NetworkSpec& spec, const std::vector<ParentRef>& parents) {
    int rows = 1;
    for (const ParentRef& p : parents) {
        const NodeSpec& parent = spec.nodes[static_cast<size_t>(p.node)];
        if (parent.kind == NodeKind::Discrete) rows *= parent.levels.value_or(1);
    }
    return rows;
}

ValidationReport validate_spec(const NetworkSpec& spec) {
    ValidationReport report;
    const int d = spec.node_count();
    if (d == 0) {
        add(report, "network has no nodes");
        return report;
    }
    bool ids_ok = true;
    for (int i = 0; i < d; ++i) {
        const NodeSpec& node = spec.nodes[static_cast<size_t>(i)];
        if (node.id != i) {
            add(report,
                fmt::format("node ids must be exactly 0..{}, found id {} at position {}",
                            d - 1, node.id, i),
                node.id);
            ids_ok = false;
        }
        if (node.kind == NodeKind::Discrete) {
            if (!node.levels.has_value()) {
                add(report, fmt::format("node {}: discrete node missing levels", node.id),
                    node.id);
            } else if (*node.levels < 2) {
                add(report,
                    fmt::format("node {}: levels must be >= 2, got {}", node.id,
                                *node.levels),
                    node.id);
            }
        } else if (node.levels.has_value()) {
            add(report,
                fmt::format("node {}: continuous node must not declare levels", node.id),
                node.id);
        }
    }
    if (!ids_ok) return report;

    const int lmax = spec.lmax();
    if (static_cast<int>(spec.epochs.size()) != lmax) {
        add(report,
            fmt::format("expected {} numbered epoch set(s) for max steady lag {}, found {}",
                        lmax, lmax, spec.epochs.size()));
    }
    for (int e = 0; e < static_cast<int>(spec.epochs.size()); ++e) {
        check_epoch(spec, spec.epochs[static_cast<size_t>(e)], e, report);
    }
    check_epoch(spec, spec.steady, kSteadyEpoch, report);
    return report;
}

std::vector<int> topo_order(const NetworkSpec& spec, int epoch) {
    const EpochCpdSet& set = spec.epoch_set(epoch);
    const int d = spec.node_count();
    std::vector<std::vector<int>> children(static_cast<size_t>(d));
    std::vector<int> in_degree(static_cast<size_t>(d), 0);
    for (int id = 0; id < d && id < static_cast<int>(set.entries.size()); ++id) {
        for (const ParentRef& p : set.entries[static_cast<size_t>(id)].parents) {
            if (p.lag == 0 && p.node >= 0 && p.node < d) {
                children[static_cast<size_t>(p.node)].push_back(id);
                ++in_degree[static_cast<size_t>(id)];
            }
        }
    }
    // Kahn with a min-heap so equal-depth nodes come out in id order
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int id = 0; id < d; ++id) {
        if (in_degree[static_cast<size_t>(id)] == 0) ready.push(id);
    }
    std::vector<int> order;
    order.reserve(static_cast<size_t>(d));
    while (!ready.empty()) {
        const int id = ready.top();
        ready.pop();
        order.push_back(id);
        for (int child : children[static_cast<size_t>(id)]) {
            if (--in_degree[static_cast<size_t>(child)] == 0) ready.push(child);
        }
    }
    if (static_cast<int>(order.size()) != d) {
        std::ostringstream oss;
        oss << "lag-0 cycle involving node(s)";
        for (int id = 0; id < d; ++id) {
            if (in_degree[static_cast<size_t>(id)] > 0) oss << ' ' << id;
        }
        throw CycleError(oss.str());
    }
    return order;
}

int parent_config_index(const std::vector<int>& values, const std::vector<int>& radices) {
    if (values.size() != radices.size()) {
        throw RangeError(fmt::format("{} values for {} radices", values.size(),
                                     radices.size()));
    }
    int index = 0;
    for (size_t j = 0; j < values.size(); ++j) {
        if (values[j] < 1 || values[j] > radices[j]) {
            throw RangeError(fmt::format("value {} out of 1..{} at position {}",
                                         values[j], radices[j], j));
        }
        index = index * radices[j] + (values[j] - 1);
    }
    return index;
}

}  // namespace tsgen
