#include "tsgen/sampler.hpp"

#include <cmath>
#include <cstring>
#include <fmt/format.h>
#include <thread>

namespace tsgen {

namespace {

// Unset cells are NaN so a premature parent read is detectable.
constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

int discrete_row_for(const NetworkSpec& spec, const NodeCpd& entry,
                     const SliceCursor& cursor) {
    int index = 0;
    for (const ParentRef& p : entry.parents) {
        const NodeSpec& parent = spec.nodes[static_cast<size_t>(p.node)];
        if (parent.kind != NodeKind::Discrete) continue;
        const double raw = cursor.cell(cursor.t - p.lag, p.node);
        if (std::isnan(raw)) {
            throw InternalError(fmt::format("parent {} unmaterialized at t={}",
                                            p.node, cursor.t));
        }
        const int value = static_cast<int>(raw);
        index = index * *parent.levels + (value - 1);
    }
    return index;
}

}  // namespace

double sample_node(const NetworkSpec& spec, int epoch, int node,
                   const SliceCursor& cursor, RngStream& stream) {
    const NodeCpd& entry = spec.epoch_set(epoch).entries[static_cast<size_t>(node)];
    const int row = discrete_row_for(spec, entry, cursor);
    if (spec.nodes[static_cast<size_t>(node)].kind == NodeKind::Discrete) {
        const auto& cpd = std::get<DiscreteCpd>(entry.cpd);
        return sample_multinomial(stream, cpd.table[static_cast<size_t>(row)]);
    }
    const auto& cpd = std::get<ConditionalGaussian>(entry.cpd);
    const GaussianRow& g = cpd.rows[static_cast<size_t>(row)];
    double mean = g.mu;
    size_t w = 0;
    for (const ParentRef& p : entry.parents) {
        if (spec.nodes[static_cast<size_t>(p.node)].kind != NodeKind::Continuous) continue;
        const double value = cursor.cell(cursor.t - p.lag, p.node);
        if (std::isnan(value)) {
            throw InternalError(fmt::format("parent {} unmaterialized at t={}",
                                            p.node, cursor.t));
        }
        if (w < cpd.weights.size()) mean += cpd.weights[w] * value;
        ++w;
    }
    return sample_gaussian(stream, mean, g.sigma);
}

std::vector<double> generate_sequence(const NetworkSpec& spec,
                                      const GenerationConfig& config,
                                      int sample_index) {
    const int d = spec.node_count();
    const int lmax = spec.lmax();
    std::vector<double> values(static_cast<size_t>(config.t_len) * d, kUnset);
    RngStream stream = derive_stream(config.seed, static_cast<std::uint64_t>(sample_index));

    // Topo orders are per-epoch; resolve each lazily once.
    std::vector<std::vector<int>> orders(static_cast<size_t>(lmax) + 1);
    auto order_for = [&](int epoch) -> const std::vector<int>& {
        const size_t slot = epoch == kSteadyEpoch ? static_cast<size_t>(lmax)
                                                  : static_cast<size_t>(epoch);
        if (orders[slot].empty()) orders[slot] = topo_order(spec, epoch);
        return orders[slot];
    };

    SliceCursor cursor{sample_index, 0, config.t_len, d, &values};
    for (int t = 0; t < config.t_len; ++t) {
        cursor.t = t;
        const int epoch = epoch_for(t, lmax);
        for (int node : order_for(epoch)) {
            values[static_cast<size_t>(t) * d + node] =
                sample_node(spec, epoch, node, cursor, stream);
        }
    }
    return values;
}

Dataset generate_dataset(const NetworkSpec& spec, const GenerationConfig& config,
                         int workers) {
    const int d = spec.node_count();
    Dataset dataset;
    dataset.n_samples = config.n_samples;
    dataset.t_len = config.t_len;
    dataset.dim = d;
    dataset.values.resize(static_cast<size_t>(config.n_samples) * config.t_len * d);

    const size_t seq_len = static_cast<size_t>(config.t_len) * d;
    auto run_range = [&](int begin, int end) {
        for (int s = begin; s < end; ++s) {
            const std::vector<double> seq = generate_sequence(spec, config, s);
            std::memcpy(dataset.values.data() + static_cast<size_t>(s) * seq_len,
                        seq.data(), seq_len * sizeof(double));
        }
    };

    if (workers <= 1 || config.n_samples <= 1) {
        run_range(0, config.n_samples);
        return dataset;
    }
    const int w = std::min(workers, config.n_samples);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(w));
    const int chunk = (config.n_samples + w - 1) / w;
    for (int i = 0; i < w; ++i) {
        const int begin = i * chunk;
        const int end = std::min(config.n_samples, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(run_range, begin, end);
    }
    for (auto& th : pool) th.join();
    return dataset;
}

}  // namespace tsgen
