#ifndef TSGEN_SAMPLER_HPP
#define TSGEN_SAMPLER_HPP

#include <vector>

#include "tsgen/model.hpp"
#include "tsgen/rng.hpp"

namespace tsgen {

// Epoch consulted at timestep t: epoch t while lagged parents do not yet
// exist, steady from t = lmax on.
inline int epoch_for(int t, int lmax) {
    return t < lmax ? t : kSteadyEpoch;
}

// Position of the sampler inside one sequence; values holds the T x D slice
// matrix being filled, which doubles as the lag history.
struct SliceCursor {
    int sample_index = 0;
    int t = 0;
    int t_len = 0;
    int dim = 0;
    std::vector<double>* values = nullptr;  // row-major T x D

    double cell(int time, int node) const {
        return (*values)[static_cast<size_t>(time) * dim + node];
    }
};

// Draws one node at cursor.t from its epoch CPD. Lag-0 parents must already
// be materialized in the current slice (guaranteed by topo order); lagged
// parents are read from earlier slices.
double sample_node(const NetworkSpec& spec, int epoch, int node,
                   const SliceCursor& cursor, RngStream& stream);

// One full T x D sequence, consuming only derive_stream(seed, sample_index).
std::vector<double> generate_sequence(const NetworkSpec& spec,
                                      const GenerationConfig& config,
                                      int sample_index);

// N sequences, each on its own derived stream; output is independent of
// worker count and scheduling. workers <= 1 runs inline.
Dataset generate_dataset(const NetworkSpec& spec, const GenerationConfig& config,
                         int workers = 1);

}  // namespace tsgen

#endif
