#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "tsgen/sampler.hpp"
#include "test_support.hpp"

using namespace tsgen;

namespace {

// one discrete node, given init row and transition matrix
NetworkSpec chain_spec(std::vector<double> init, std::vector<std::vector<double>> trans) {
    NetworkSpec spec;
    const int k = static_cast<int>(init.size());
    spec.nodes = {{0, NodeKind::Discrete, k, std::nullopt}};
    EpochCpdSet epoch0;
    epoch0.entries.resize(1);
    epoch0.entries[0].cpd = DiscreteCpd{{std::move(init)}};
    EpochCpdSet steady;
    steady.entries.resize(1);
    steady.entries[0].parents = {{0, 1}};
    steady.entries[0].cpd = DiscreteCpd{std::move(trans)};
    spec.epochs = {epoch0};
    spec.steady = std::move(steady);
    return spec;
}

}  // namespace

TEST_CASE("epoch_for selects startup epochs then steady") {
    CHECK(epoch_for(0, 1) == 0);
    CHECK(epoch_for(1, 1) == kSteadyEpoch);
    CHECK(epoch_for(19, 1) == kSteadyEpoch);
    CHECK(epoch_for(1, 3) == 1);
    CHECK(epoch_for(2, 3) == 2);
    CHECK(epoch_for(3, 3) == kSteadyEpoch);
}

TEST_CASE("point-mass CPD row always yields its level") {
    NetworkSpec spec = chain_spec({0, 0, 1, 0}, {{0, 0, 1, 0}, {0, 0, 1, 0}, {0, 0, 1, 0}, {0, 0, 1, 0}});
    REQUIRE(validate_spec(spec).valid());
    const std::vector<double> seq = generate_sequence(spec, {10, 1, 5}, 0);
    for (double v : seq) CHECK(v == 3.0);
}

TEST_CASE("identity transition freezes the initial state") {
    NetworkSpec spec = chain_spec({0.5, 0.5}, {{1, 0}, {0, 1}});
    for (int s = 0; s < 20; ++s) {
        const std::vector<double> seq = generate_sequence(spec, {15, 1, 3}, s);
        for (double v : seq) CHECK(v == seq[0]);
    }
}

TEST_CASE("T=1 consults only epoch 0") {
    // the steady CPD is a point mass on level 2 but must never be used
    NetworkSpec spec = chain_spec({1, 0}, {{0, 1}, {0, 1}});
    const std::vector<double> seq = generate_sequence(spec, {1, 1, 11}, 0);
    REQUIRE(seq.size() == 1);
    CHECK(seq[0] == 1.0);
}

TEST_CASE("example 1 sequences have the declared shape and ranges") {
    const NetworkSpec spec = testing::example1().network;
    const std::vector<double> seq = generate_sequence(spec, {20, 1, 42}, 0);
    REQUIRE(seq.size() == 40);
    for (int t = 0; t < 20; ++t) {
        const double state = seq[static_cast<size_t>(t) * 2];
        CHECK(state == std::floor(state));
        CHECK(state >= 1.0);
        CHECK(state <= 4.0);
        CHECK(std::isfinite(seq[static_cast<size_t>(t) * 2 + 1]));
    }
}

TEST_CASE("same config twice gives identical datasets") {
    const NetworkSpec spec = testing::example1().network;
    const GenerationConfig config{20, 50, 42};
    CHECK(generate_dataset(spec, config) == generate_dataset(spec, config));
}

TEST_CASE("worker count does not change the output") {
    const NetworkSpec spec = testing::example1().network;
    const GenerationConfig config{20, 100, 7};
    const Dataset reference = generate_dataset(spec, config, 1);
    for (int workers : {2, 3, 8}) {
        CHECK(generate_dataset(spec, config, workers) == reference);
    }
}

TEST_CASE("steady-state transition frequencies match the declared matrix") {
    const NetworkSpec spec = testing::example1().network;
    const Dataset dataset = generate_dataset(spec, {20, 1000, 42});
    const auto& declared = std::get<DiscreteCpd>(spec.steady.entries[0].cpd).table;
    // counting oracle over the ~19000 observed transitions
    std::vector<std::vector<long long>> counts(4, std::vector<long long>(4, 0));
    for (int s = 0; s < dataset.n_samples; ++s) {
        for (int t = 1; t < dataset.t_len; ++t) {
            const int from = static_cast<int>(dataset.at(s, t - 1, 0)) - 1;
            const int to = static_cast<int>(dataset.at(s, t, 0)) - 1;
            ++counts[static_cast<size_t>(from)][static_cast<size_t>(to)];
        }
    }
    for (int i = 0; i < 4; ++i) {
        long long total = 0;
        for (long long c : counts[static_cast<size_t>(i)]) total += c;
        REQUIRE(total > 0);
        for (int j = 0; j < 4; ++j) {
            const double freq = static_cast<double>(counts[static_cast<size_t>(i)][static_cast<size_t>(j)]) /
                                static_cast<double>(total);
            CHECK(std::abs(freq - declared[static_cast<size_t>(i)][static_cast<size_t>(j)]) < 0.03);
        }
    }
}

TEST_CASE("tiny chain matches exact joint from brute-force enumeration") {
    // 1 discrete node, K=2, T=2: four outcomes enumerated exactly
    NetworkSpec spec = chain_spec({0.3, 0.7}, {{0.8, 0.2}, {0.4, 0.6}});
    REQUIRE(validate_spec(spec).valid());
    const testing::JointOracle oracle = testing::exact_joint(spec, 2);
    REQUIRE(oracle.probs.size() == 4);

    const int n = 200000;
    const Dataset dataset = generate_dataset(spec, {2, n, 5}, 4);
    std::map<long long, double> freq;
    for (int s = 0; s < n; ++s) freq[testing::outcome_key(spec, dataset, s)] += 1.0 / n;
    for (const auto& [key, p] : oracle.probs) {
        CHECK(std::abs(freq[key] - p) < 0.005);
    }
}

TEST_CASE("lagged parents beyond lag 1 read the right slice") {
    // lag-2 copy chain: epoch 0 and 1 pin the state, steady copies t-2
    NetworkSpec spec;
    spec.nodes = {{0, NodeKind::Discrete, 2, std::nullopt}};
    EpochCpdSet epoch0, epoch1, steady;
    epoch0.entries.resize(1);
    epoch0.entries[0].cpd = DiscreteCpd{{{1, 0}}};  // level 1 at t=0
    epoch1.entries.resize(1);
    epoch1.entries[0].cpd = DiscreteCpd{{{0, 1}}};  // level 2 at t=1
    steady.entries.resize(1);
    steady.entries[0].parents = {{0, 2}};
    steady.entries[0].cpd = DiscreteCpd{{{1, 0}, {0, 1}}};  // copy of t-2
    spec.epochs = {epoch0, epoch1};
    spec.steady = steady;
    REQUIRE(validate_spec(spec).valid());
    const std::vector<double> seq = generate_sequence(spec, {8, 1, 1}, 0);
    for (int t = 0; t < 8; ++t) {
        CHECK(seq[static_cast<size_t>(t)] == (t % 2 == 0 ? 1.0 : 2.0));
    }
}

TEST_CASE("continuous parent contributes through weights") {
    // node 0 ~ N(10, sigma tiny), node 1 = 2 * node0 + N(1, sigma tiny)
    NetworkSpec spec;
    spec.nodes = {{0, NodeKind::Continuous, std::nullopt, std::nullopt},
                  {1, NodeKind::Continuous, std::nullopt, std::nullopt}};
    EpochCpdSet set;
    set.entries.resize(2);
    set.entries[0].cpd = ConditionalGaussian{{{10.0, 1e-9}}, {}};
    set.entries[1].parents = {{0, 0}};
    set.entries[1].cpd = ConditionalGaussian{{{1.0, 1e-9}}, {2.0}};
    spec.epochs = {set};
    spec.steady = set;
    REQUIRE(validate_spec(spec).valid());
    const std::vector<double> seq = generate_sequence(spec, {3, 1, 99}, 0);
    for (int t = 0; t < 3; ++t) {
        CHECK(seq[static_cast<size_t>(t) * 2] == doctest::Approx(10.0).epsilon(1e-6));
        CHECK(seq[static_cast<size_t>(t) * 2 + 1] == doctest::Approx(21.0).epsilon(1e-6));
    }
}

TEST_CASE("example 1 dataset generation stays well under the time budget") {
    const NetworkSpec spec = testing::example1().network;
    const auto start = std::chrono::steady_clock::now();
    const Dataset dataset = generate_dataset(spec, {20, 1000, 42});
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    CHECK(dataset.values.size() == 40000);
    CHECK(elapsed.count() < 2.0);
}
