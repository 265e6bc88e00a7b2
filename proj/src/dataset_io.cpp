#include "tsgen/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <sstream>

#include <json.hpp>

#include "tsgen/spec_io.hpp"

namespace tsgen {

namespace {

std::string column_name(const NodeSpec& node) {
    return node.name ? *node.name : fmt::format("u{}", node.id);
}

void append_double(std::string& out, double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, end);
}

}  // namespace

std::string dataset_to_csv(const Dataset& dataset, const NetworkSpec& spec) {
    std::string out = "sample,t";
    for (const NodeSpec& node : spec.nodes) {
        out += ',';
        out += column_name(node);
    }
    out += '\n';
    for (int s = 0; s < dataset.n_samples; ++s) {
        for (int t = 0; t < dataset.t_len; ++t) {
            out += std::to_string(s);
            out += ',';
            out += std::to_string(t);
            for (int i = 0; i < dataset.dim; ++i) {
                out += ',';
                const double v = dataset.at(s, t, i);
                if (spec.nodes[static_cast<size_t>(i)].kind == NodeKind::Discrete) {
                    out += std::to_string(static_cast<long long>(v));
                } else {
                    append_double(out, v);
                }
            }
            out += '\n';
        }
    }
    return out;
}

Dataset dataset_from_csv(const std::string& text, const NetworkSpec& spec) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty CSV");
    const int d = spec.node_count();
    {
        int commas = 0;
        for (char c : line) commas += c == ',';
        if (commas != d + 1) {
            throw StructureMismatch(fmt::format("CSV header has {} columns, expected {}",
                                                commas + 1, d + 2));
        }
    }
    struct Row {
        int sample;
        int t;
        std::vector<double> cells;
    };
    std::vector<Row> rows;
    int max_sample = -1;
    int max_t = -1;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Row row;
        row.cells.resize(static_cast<size_t>(d));
        const char* p = line.data();
        const char* end = line.data() + line.size();
        auto field = [&](auto& value) {
            const auto [next, ec] = std::from_chars(p, end, value);
            if (ec != std::errc{}) {
                throw ParseError(fmt::format("line {}: bad numeric field", line_no));
            }
            p = next;
            if (p < end && *p == ',') ++p;
        };
        field(row.sample);
        field(row.t);
        for (int i = 0; i < d; ++i) field(row.cells[static_cast<size_t>(i)]);
        max_sample = std::max(max_sample, row.sample);
        max_t = std::max(max_t, row.t);
        rows.push_back(std::move(row));
    }
    Dataset dataset;
    dataset.n_samples = max_sample + 1;
    dataset.t_len = max_t + 1;
    dataset.dim = d;
    if (rows.size() != static_cast<size_t>(dataset.n_samples) * dataset.t_len) {
        throw ParseError(fmt::format("expected {} data rows for N={}, T={}, found {}",
                                     static_cast<size_t>(dataset.n_samples) * dataset.t_len,
                                     dataset.n_samples, dataset.t_len, rows.size()));
    }
    dataset.values.resize(rows.size() * static_cast<size_t>(d));
    for (const Row& row : rows) {
        for (int i = 0; i < d; ++i) {
            dataset.at(row.sample, row.t, i) = row.cells[static_cast<size_t>(i)];
        }
    }
    return dataset;
}

std::string spec_hash(const NetworkSpec& spec) {
    const std::string canonical = serialize_spec({spec, std::nullopt});
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

std::string dataset_to_json(const Dataset& dataset, const NetworkSpec& spec,
                            std::uint64_t seed) {
    nlohmann::ordered_json out;
    out["metadata"] = {{"spec_hash", spec_hash(spec)},
                       {"seed", seed},
                       {"T", dataset.t_len},
                       {"N", dataset.n_samples}};
    auto& values = out["values"] = nlohmann::ordered_json::array();
    for (int s = 0; s < dataset.n_samples; ++s) {
        nlohmann::ordered_json sample = nlohmann::ordered_json::array();
        for (int t = 0; t < dataset.t_len; ++t) {
            nlohmann::ordered_json slice = nlohmann::ordered_json::array();
            for (int i = 0; i < dataset.dim; ++i) {
                const double v = dataset.at(s, t, i);
                if (spec.nodes[static_cast<size_t>(i)].kind == NodeKind::Discrete) {
                    slice.push_back(static_cast<long long>(v));
                } else {
                    slice.push_back(v);
                }
            }
            sample.push_back(std::move(slice));
        }
        values.push_back(std::move(sample));
    }
    return out.dump() + "\n";
}

}  // namespace tsgen
