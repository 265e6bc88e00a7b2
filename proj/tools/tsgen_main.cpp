#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tsgen/dataset_io.hpp"
#include "tsgen/hmm.hpp"
#include "tsgen/model.hpp"
#include "tsgen/sampler.hpp"
#include "tsgen/spec_io.hpp"
#include "tsgen/stats.hpp"

namespace {

constexpr int kExitIoOrParse = 1;
constexpr int kExitInvalidSpec = 2;
constexpr int kExitStatsFailure = 3;
constexpr int kExitNotAnHmm = 4;

struct CommonOpts {
    std::string spec_path;
    std::optional<int> t_len;
    std::optional<int> n_samples;
    std::optional<std::uint64_t> seed;
    int workers = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_workers = true) {
    cmd->add_option("spec", opts.spec_path, "network spec file (JSON)")->required();
    cmd->add_option("--t,-T", opts.t_len, "timesteps per sequence (overrides spec)");
    cmd->add_option("--n,-N", opts.n_samples, "number of sequences (overrides spec)");
    cmd->add_option("--seed", opts.seed, "master seed (overrides spec and TSGEN_SEED)");
    if (with_workers) {
        cmd->add_option("--workers", opts.workers, "worker threads (output-invariant)")
            ->check(CLI::PositiveNumber);
    }
}

// Precedence: flag > spec "generation" block > TSGEN_SEED (seed only) > defaults.
tsgen::GenerationConfig resolve_config(const CommonOpts& opts,
                                       const tsgen::SpecDocument& doc) {
    tsgen::GenerationConfig config;
    if (const char* env = std::getenv("TSGEN_SEED")) {
        config.seed = std::strtoull(env, nullptr, 10);
    }
    if (doc.generation) config = *doc.generation;
    if (opts.t_len) config.t_len = *opts.t_len;
    if (opts.n_samples) config.n_samples = *opts.n_samples;
    if (opts.seed) config.seed = *opts.seed;
    if (config.t_len < 1 || config.n_samples < 1) {
        throw tsgen::SchemaError("T and N must be >= 1 (set them in the spec's "
                                 "\"generation\" block or with --t/--n)");
    }
    return config;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw tsgen::ParseError("cannot open " + path + " for writing");
    out << content;
}

int run_validate(const std::string& spec_path) {
    tsgen::load_spec_file(spec_path);  // SchemaError/SemanticError map to exit 2
    std::cout << "OK\n";
    return 0;
}

int run_generate(const CommonOpts& opts, const std::string& out_path,
                 const std::string& format) {
    const tsgen::SpecDocument doc = tsgen::load_spec_file(opts.spec_path);
    const tsgen::GenerationConfig config = resolve_config(opts, doc);

    const auto start = std::chrono::steady_clock::now();
    const tsgen::Dataset dataset =
        tsgen::generate_dataset(doc.network, config, opts.workers);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::fprintf(stderr, "generation time: %.6f s\n", elapsed.count());

    const std::string payload =
        format == "json" ? tsgen::dataset_to_json(dataset, doc.network, config.seed)
                         : tsgen::dataset_to_csv(dataset, doc.network);
    if (out_path.empty() || out_path == "-") {
        std::cout << payload;
    } else {
        write_file(out_path, payload);
    }
    return 0;
}

int run_stats(const CommonOpts& opts, const std::string& data_path,
              const std::string& out_path, double alpha) {
    const tsgen::SpecDocument doc = tsgen::load_spec_file(opts.spec_path);
    tsgen::Dataset dataset;
    if (!data_path.empty()) {
        std::ifstream in(data_path, std::ios::binary);
        if (!in) throw tsgen::ParseError("cannot open " + data_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        dataset = tsgen::dataset_from_csv(buf.str(), doc.network);
    } else {
        dataset = tsgen::generate_dataset(doc.network, resolve_config(opts, doc),
                                          opts.workers);
    }
    const tsgen::StatsReport report =
        tsgen::build_stats_report(dataset, doc.network, alpha);
    if (!out_path.empty()) write_file(out_path, tsgen::stats_report_to_json(report));
    std::cout << tsgen::stats_report_to_text(report);
    return report.all_pass() ? 0 : kExitStatsFailure;
}

int run_hmm_eval(const CommonOpts& opts, double min_accuracy) {
    const tsgen::SpecDocument doc = tsgen::load_spec_file(opts.spec_path);
    const tsgen::HmmParams params = tsgen::extract_hmm_params(doc.network);
    const tsgen::GenerationConfig config = resolve_config(opts, doc);
    const tsgen::Dataset dataset =
        tsgen::generate_dataset(doc.network, config, opts.workers);

    const double accuracy = tsgen::decode_accuracy(dataset, doc.network);
    double loglik = 0.0;
    std::vector<double> obs(static_cast<size_t>(dataset.t_len));
    for (int s = 0; s < dataset.n_samples; ++s) {
        for (int t = 0; t < dataset.t_len; ++t) obs[static_cast<size_t>(t)] = dataset.at(s, t, 1);
        loglik += tsgen::forward_loglik(params, obs);
    }
    loglik /= dataset.n_samples;

    std::printf("decode accuracy: %.4f\n", accuracy);
    std::printf("mean forward log-likelihood: %.6f\n", loglik);
    return accuracy >= min_accuracy ? 0 : kExitStatsFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tsgen: synthetic time-series generation from dynamic Bayesian networks"};
    app.require_subcommand(1);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "check a network spec");
    validate->add_option("spec", validate_path, "network spec file (JSON)")->required();

    CommonOpts gen_opts;
    std::string gen_out;
    std::string gen_format = "csv";
    auto* generate = app.add_subcommand("generate", "sample a dataset");
    add_common(generate, gen_opts);
    generate->add_option("-o,--out", gen_out, "output file (default stdout)");
    generate->add_option("--format", gen_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    CommonOpts stats_opts;
    std::string stats_data;
    std::string stats_out;
    double alpha = 0.01;
    auto* stats = app.add_subcommand("stats", "verify data against the declared CPDs");
    add_common(stats, stats_opts);
    stats->add_option("--data", stats_data, "existing CSV dataset (skips generation)");
    stats->add_option("-o,--out", stats_out, "write the JSON report here");
    stats->add_option("--alpha", alpha, "chi-square significance level")
        ->check(CLI::Range(0.0, 1.0));

    CommonOpts hmm_opts;
    double min_accuracy = 0.93;
    auto* hmm = app.add_subcommand("hmm-eval", "Viterbi decode check for HMM-shaped specs");
    add_common(hmm, hmm_opts);
    hmm->add_option("--min-accuracy", min_accuracy, "pass threshold for decode accuracy");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return run_validate(validate_path);
        if (generate->parsed()) return run_generate(gen_opts, gen_out, gen_format);
        if (stats->parsed()) return run_stats(stats_opts, stats_data, stats_out, alpha);
        if (hmm->parsed()) return run_hmm_eval(hmm_opts, min_accuracy);
    } catch (const tsgen::NotAnHmm& e) {
        std::cerr << "error: not an HMM: " << e.what() << "\n";
        return kExitNotAnHmm;
    } catch (const tsgen::SemanticError& e) {
        std::cerr << "error: invalid spec: " << e.what() << "\n";
        return kExitInvalidSpec;
    } catch (const tsgen::SchemaError& e) {
        std::cerr << "error: invalid spec: " << e.what() << "\n";
        return kExitInvalidSpec;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIoOrParse;
    }
    return 0;
}
