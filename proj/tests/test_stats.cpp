#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "tsgen/sampler.hpp"
#include "tsgen/stats.hpp"
#include "test_support.hpp"

using namespace tsgen;

namespace {

// chi-square upper tail by Simpson quadrature of the density, independent of
// the Wilson-Hilferty path under test
double chi2_tail_quadrature(double x, int dof) {
    const double k = static_cast<double>(dof);
    auto density = [k](double t) {
        if (t <= 0.0) return 0.0;
        return std::exp((k / 2.0 - 1.0) * std::log(t) - t / 2.0 -
                        (k / 2.0) * std::log(2.0) - std::lgamma(k / 2.0));
    };
    // integrate [x, x + 200] which captures the tail to ~1e-40
    const int steps = 200000;
    const double h = 200.0 / steps;
    double sum = density(x) + density(x + 200.0);
    for (int i = 1; i < steps; ++i) {
        sum += density(x + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

}  // namespace

TEST_CASE("perfect fit gives statistic 0 and p = 1") {
    const ChiSquareResult r = chi_square_gof({50, 50}, {0.5, 0.5}, 100);
    CHECK_FALSE(r.skipped);
    CHECK(r.statistic == 0.0);
    CHECK(r.dof == 1);
    CHECK(r.p_value == 1.0);
}

TEST_CASE("chi-square arithmetic on a 30/70 split") {
    const ChiSquareResult r = chi_square_gof({30, 70}, {0.5, 0.5}, 100);
    CHECK(r.statistic == doctest::Approx(16.0));
    CHECK(r.dof == 1);
}

TEST_CASE("Wilson-Hilferty p-value tracks the quadrature oracle") {
    // frozen oracle values (Simpson quadrature of the chi-square density):
    //   P(X > 16 | dof 1)  = 6.334e-5
    //   P(X > 7.8 | dof 3) = 5.035e-2
    CHECK(chi2_tail_quadrature(16.0, 1) == doctest::Approx(6.334e-5).epsilon(1e-3));
    const ChiSquareResult r1 = chi_square_gof({30, 70}, {0.5, 0.5}, 100);
    CHECK(std::abs(r1.p_value - 6.334e-5) < 5e-5);  // dof 1 is WH's worst case
    CHECK(r1.p_value < 0.01);                       // reject at alpha = 0.01

    // dof 3, moderate statistic: WH is 3-digit accurate here
    const ChiSquareResult r3 = chi_square_gof({130, 70, 100, 100}, {0.25, 0.25, 0.25, 0.25}, 400);
    CHECK(r3.statistic == doctest::Approx(18.0));
    CHECK(std::abs(r3.p_value - chi2_tail_quadrature(18.0, 3)) < 2e-4);
}

TEST_CASE("rows with expected counts below 5 are skipped") {
    const ChiSquareResult r = chi_square_gof({1, 99}, {0.01, 0.99}, 100);
    CHECK(r.skipped);
}

TEST_CASE("chi-square statistic is invariant under category relabeling") {
    std::mt19937_64 rng(3);
    const std::vector<long long> observed = {40, 25, 20, 15};
    const std::vector<double> expected = {0.3, 0.3, 0.2, 0.2};
    const double reference = chi_square_gof(observed, expected, 100).statistic;
    std::vector<size_t> perm = {0, 1, 2, 3};
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<long long> o(4);
        std::vector<double> e(4);
        for (size_t i = 0; i < 4; ++i) {
            o[i] = observed[perm[i]];
            e[i] = expected[perm[i]];
        }
        CHECK(chi_square_gof(o, e, 100).statistic == doctest::Approx(reference));
    }
}

TEST_CASE("kl divergence identities") {
    CHECK(kl_divergence({0.3, 0.7}, {0.3, 0.7}) == 0.0);
    CHECK(kl_divergence({1.0, 0.0}, {0.5, 0.5}) == doctest::Approx(std::log(2.0)));
    CHECK(std::isinf(kl_divergence({0.5, 0.5}, {1.0, 0.0})));
}

TEST_CASE("kl divergence is nonnegative on random distribution pairs") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = testing::random_distribution(rng, 4);
        const auto q = testing::random_distribution(rng, 4);
        CHECK(kl_divergence(p, q) >= 0.0);
    }
}

TEST_CASE("empirical counts concentrate on the diagonal for identity transitions") {
    NetworkSpec spec;
    spec.nodes = {{0, NodeKind::Discrete, 3, std::nullopt}};
    EpochCpdSet epoch0, steady;
    epoch0.entries.resize(1);
    epoch0.entries[0].cpd = DiscreteCpd{{{1.0 / 3, 1.0 / 3, 1.0 / 3}}};
    steady.entries.resize(1);
    steady.entries[0].parents = {{0, 1}};
    steady.entries[0].cpd = DiscreteCpd{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    spec.epochs = {epoch0};
    spec.steady = steady;
    const Dataset dataset = generate_dataset(spec, {10, 200, 17});
    const auto counts = empirical_discrete(dataset, spec, 0, kSteadyEpoch);
    for (size_t i = 0; i < 3; ++i) {
        for (size_t j = 0; j < 3; ++j) {
            if (i != j) CHECK(counts[i][j] == 0);
        }
    }
}

TEST_CASE("epoch-0 counts on example 1 are near-uniform and sum to N") {
    const NetworkSpec spec = testing::example1().network;
    const Dataset dataset = generate_dataset(spec, {20, 1000, 42});
    const auto counts = empirical_discrete(dataset, spec, 0, 0);
    REQUIRE(counts.size() == 1);
    long long total = 0;
    for (long long c : counts[0]) {
        CHECK(std::abs(c - 250) <= 40);
        total += c;
    }
    CHECK(total == 1000);
}

TEST_CASE("empirical counts over all rows equal the pairs in the epoch") {
    const NetworkSpec spec = testing::example1().network;
    const Dataset dataset = generate_dataset(spec, {20, 100, 8});
    const auto counts = empirical_discrete(dataset, spec, 0, kSteadyEpoch);
    long long total = 0;
    for (const auto& row : counts) {
        for (long long c : row) total += c;
    }
    CHECK(total == 100LL * 19);  // all t >= 1
}

TEST_CASE("steady row-normalized counts are within 0.03 of the declared matrix") {
    const NetworkSpec spec = testing::example1().network;
    const Dataset dataset = generate_dataset(spec, {20, 1000, 42});
    const auto counts = empirical_discrete(dataset, spec, 0, kSteadyEpoch);
    const auto& declared = std::get<DiscreteCpd>(spec.steady.entries[0].cpd).table;
    for (size_t r = 0; r < 4; ++r) {
        double total = 0.0;
        for (long long c : counts[r]) total += static_cast<double>(c);
        std::vector<double> empirical;
        for (long long c : counts[r]) empirical.push_back(static_cast<double>(c) / total);
        for (size_t k = 0; k < 4; ++k) {
            CHECK(std::abs(empirical[k] - declared[r][k]) < 0.03);
        }
        CHECK(kl_divergence(empirical, declared[r]) < 0.01);
    }
}

TEST_CASE("gaussian moments on example 1 emissions") {
    const NetworkSpec spec = testing::example1().network;
    const Dataset dataset = generate_dataset(spec, {20, 1000, 42});
    const MomentSummary row0 = gaussian_moments(dataset, spec, 1, 0);
    REQUIRE(row0.n > 1000);
    CHECK(*row0.mean == doctest::Approx(20.0).epsilon(0.025));
    CHECK(*row0.stddev == doctest::Approx(5.0).epsilon(0.1));
}

TEST_CASE("degenerate spread collapses the sample std") {
    NetworkSpec spec = testing::example1().network;
    for (EpochCpdSet* set : {&spec.epochs[0], &spec.steady}) {
        for (GaussianRow& row : std::get<ConditionalGaussian>(set->entries[1].cpd).rows) {
            row.sigma = 1e-6;
        }
    }
    const Dataset dataset = generate_dataset(spec, {20, 50, 3});
    const MomentSummary row0 = gaussian_moments(dataset, spec, 1, 0);
    REQUIRE(row0.n >= 2);
    CHECK(*row0.stddev <= 1e-5);
}

TEST_CASE("unvisited parent configuration reports an empty summary") {
    NetworkSpec spec = testing::example1().network;
    // pin the chain to state 1 forever
    std::get<DiscreteCpd>(spec.epochs[0].entries[0].cpd).table = {{1, 0, 0, 0}};
    std::get<DiscreteCpd>(spec.steady.entries[0].cpd).table = {
        {1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}};
    const Dataset dataset = generate_dataset(spec, {5, 10, 1});
    const MomentSummary row3 = gaussian_moments(dataset, spec, 1, 3);
    CHECK(row3.n == 0);
    CHECK_FALSE(row3.mean.has_value());
    CHECK_FALSE(row3.stddev.has_value());
}

TEST_CASE("structure mismatch is detected") {
    const NetworkSpec spec = testing::example1().network;
    Dataset dataset = generate_dataset(spec, {5, 4, 1});
    dataset.dim = 3;
    CHECK_THROWS_AS(empirical_discrete(dataset, spec, 0, 0), StructureMismatch);
}

TEST_CASE("full report on example 1 passes at alpha 0.01") {
    const NetworkSpec spec = testing::example1().network;
    const Dataset dataset = generate_dataset(spec, {20, 1000, 42});
    const StatsReport report = build_stats_report(dataset, spec, 0.01);
    CHECK(report.all_pass());
    CHECK(report.discrete_rows.size() == 5);    // 1 init row + 4 transition rows
    CHECK(report.continuous_rows.size() == 8);  // 4 emission rows in each epoch
    const std::string json = stats_report_to_json(report);
    CHECK(json.find("\"all_pass\": true") != std::string::npos);
    CHECK_FALSE(stats_report_to_text(report).empty());
}
