#ifndef TSGEN_RNG_HPP
#define TSGEN_RNG_HPP

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "tsgen/errors.hpp"

namespace tsgen {

// SplitMix64 step, used only to expand seeds into xoshiro state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d9ecf646eabfc1ULL;
    return z ^ (z >> 31);
}

// xoshiro256++ core seeded via SplitMix64, with a cached Box-Muller second
// variate. Single-owner: one stream per generated sequence.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result =
            std::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = std::rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via basic Box-Muller; the sine variate is cached.
    double next_standard_normal() {
        if (cached_normal_) {
            const double z = *cached_normal_;
            cached_normal_.reset();
            return z;
        }
        const double u1 = 1.0 - next_uniform();  // (0, 1], keeps log finite
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        cached_normal_ = r * std::sin(theta);
        return r * std::cos(theta);
    }

    const std::array<std::uint64_t, 4>& state() const { return state_; }

private:
    std::array<std::uint64_t, 4> state_{};
    std::optional<double> cached_normal_;
};

// Independent substream for one sample. The per-stream seed is an injective
// mix of (master_seed, sample_index), so streams never collide and the
// result does not depend on evaluation order.
inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t sample_index) {
    return RngStream(master_seed + 0x9e3779b97f4a7c15ULL * (sample_index + 1));
}

// Smallest 1-based level whose cumulative probability exceeds u.
inline int multinomial_level_for(const std::vector<double>& probs, double u) {
    double cum = 0.0;
    for (size_t k = 0; k < probs.size(); ++k) {
        cum += probs[k];
        if (cum > u) return static_cast<int>(k) + 1;
    }
    return static_cast<int>(probs.size());  // u landed past the last breakpoint
}

inline void check_distribution(const std::vector<double>& probs) {
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0 || !std::isfinite(p)) {
            throw InvalidDistribution("probabilities must be nonnegative");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw InvalidDistribution("probabilities must sum to 1");
    }
}

// Inverse-CDF multinomial draw, 1-based level.
inline int sample_multinomial(RngStream& stream, const std::vector<double>& probs) {
    check_distribution(probs);
    return multinomial_level_for(probs, stream.next_uniform());
}

inline double sample_gaussian(RngStream& stream, double mu, double sigma) {
    if (!(sigma > 0.0)) {
        throw InvalidDistribution("sigma must be > 0");
    }
    return mu + sigma * stream.next_standard_normal();
}

}  // namespace tsgen

#endif
