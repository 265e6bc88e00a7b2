#include "tsgen/spec_io.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace tsgen {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void schema_fail(const std::string& path, const std::string& msg) {
    throw SchemaError(fmt::format("{}: {}", path, msg));
}

const json& require_key(const json& obj, const std::string& path, const std::string& key) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_fail(path, fmt::format("missing key \"{}\"", key));
    return *it;
}

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            schema_fail(path, fmt::format("unknown key \"{}\"", key));
        }
    }
}

int expect_int(const json& value, const std::string& path) {
    if (!value.is_number_integer()) schema_fail(path, "expected an integer");
    return value.get<int>();
}

std::uint64_t expect_u64(const json& value, const std::string& path) {
    if (!value.is_number_integer() ||
        (!value.is_number_unsigned() && value.get<std::int64_t>() < 0)) {
        schema_fail(path, "expected an unsigned integer");
    }
    return value.get<std::uint64_t>();
}

double expect_number(const json& value, const std::string& path) {
    if (!value.is_number()) schema_fail(path, "expected a number");
    return value.get<double>();
}

std::vector<NodeSpec> parse_nodes(const json& arr) {
    if (!arr.is_array()) schema_fail("nodes", "expected an array");
    std::vector<NodeSpec> nodes;
    std::set<int> seen;
    for (size_t i = 0; i < arr.size(); ++i) {
        const std::string path = fmt::format("nodes[{}]", i);
        const json& obj = arr[i];
        if (!obj.is_object()) schema_fail(path, "expected an object");
        reject_unknown(obj, path, {"id", "kind", "levels", "name"});
        NodeSpec node;
        node.id = expect_int(require_key(obj, path, "id"), path + ".id");
        const json& kind = require_key(obj, path, "kind");
        if (!kind.is_string()) schema_fail(path + ".kind", "expected \"D\" or \"C\"");
        const std::string k = kind.get<std::string>();
        if (k == "D") {
            node.kind = NodeKind::Discrete;
        } else if (k == "C") {
            node.kind = NodeKind::Continuous;
        } else {
            schema_fail(path + ".kind", fmt::format("expected \"D\" or \"C\", got \"{}\"", k));
        }
        if (obj.contains("levels")) {
            node.levels = expect_int(obj["levels"], path + ".levels");
        }
        if (obj.contains("name")) {
            if (!obj["name"].is_string()) schema_fail(path + ".name", "expected a string");
            node.name = obj["name"].get<std::string>();
        }
        if (!seen.insert(node.id).second) {
            throw SemanticError(fmt::format("duplicate node id {} (nodes[{}])", node.id, i));
        }
        nodes.push_back(std::move(node));
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });
    return nodes;
}

Cpd parse_cpd(const json& obj, const std::string& path) {
    if (!obj.is_object()) schema_fail(path, "expected an object");
    const bool has_table = obj.contains("table");
    const bool has_rows = obj.contains("rows");
    if (has_table == has_rows) {
        schema_fail(path, "expected exactly one of \"table\" (discrete) or \"rows\" (continuous)");
    }
    if (has_table) {
        reject_unknown(obj, path, {"table"});
        const json& table = obj["table"];
        if (!table.is_array()) schema_fail(path + ".table", "expected an array of rows");
        DiscreteCpd cpd;
        for (size_t r = 0; r < table.size(); ++r) {
            const std::string rpath = fmt::format("{}.table[{}]", path, r);
            if (!table[r].is_array()) schema_fail(rpath, "expected an array of probabilities");
            std::vector<double> row;
            for (size_t c = 0; c < table[r].size(); ++c) {
                row.push_back(expect_number(table[r][c], fmt::format("{}[{}]", rpath, c)));
            }
            cpd.table.push_back(std::move(row));
        }
        return cpd;
    }
    reject_unknown(obj, path, {"rows", "weights"});
    ConditionalGaussian cpd;
    const json& rows = obj["rows"];
    if (!rows.is_array()) schema_fail(path + ".rows", "expected an array");
    for (size_t r = 0; r < rows.size(); ++r) {
        const std::string rpath = fmt::format("{}.rows[{}]", path, r);
        if (!rows[r].is_object()) schema_fail(rpath, "expected an object");
        reject_unknown(rows[r], rpath, {"mu", "sigma"});
        GaussianRow g;
        g.mu = expect_number(require_key(rows[r], rpath, "mu"), rpath + ".mu");
        g.sigma = expect_number(require_key(rows[r], rpath, "sigma"), rpath + ".sigma");
        cpd.rows.push_back(g);
    }
    if (obj.contains("weights")) {
        const json& weights = obj["weights"];
        if (!weights.is_array()) schema_fail(path + ".weights", "expected an array");
        for (size_t i = 0; i < weights.size(); ++i) {
            cpd.weights.push_back(
                expect_number(weights[i], fmt::format("{}.weights[{}]", path, i)));
        }
    }
    return cpd;
}

EpochCpdSet parse_epoch_block(const json& block, const std::string& path, int node_count) {
    if (!block.is_object()) schema_fail(path, "expected an object");
    EpochCpdSet set;
    set.entries.resize(static_cast<size_t>(node_count));
    std::vector<bool> present(static_cast<size_t>(node_count), false);
    for (const auto& [key, value] : block.items()) {
        int id = -1;
        try {
            size_t pos = 0;
            id = std::stoi(key, &pos);
            if (pos != key.size()) id = -1;
        } catch (const std::exception&) {
            id = -1;
        }
        if (id < 0 || id >= node_count) {
            schema_fail(path, fmt::format("unknown node id \"{}\"", key));
        }
        const std::string epath = fmt::format("{}.{}", path, key);
        if (!value.is_object()) schema_fail(epath, "expected an object");
        reject_unknown(value, epath, {"parents", "cpd"});
        NodeCpd entry;
        const json& parents = require_key(value, epath, "parents");
        if (!parents.is_array()) schema_fail(epath + ".parents", "expected an array");
        for (size_t i = 0; i < parents.size(); ++i) {
            const std::string ppath = fmt::format("{}.parents[{}]", epath, i);
            if (!parents[i].is_object()) schema_fail(ppath, "expected an object");
            reject_unknown(parents[i], ppath, {"node", "lag"});
            ParentRef ref;
            ref.node = expect_int(require_key(parents[i], ppath, "node"), ppath + ".node");
            ref.lag = expect_int(require_key(parents[i], ppath, "lag"), ppath + ".lag");
            entry.parents.push_back(ref);
        }
        entry.cpd = parse_cpd(require_key(value, epath, "cpd"), epath + ".cpd");
        set.entries[static_cast<size_t>(id)] = std::move(entry);
        present[static_cast<size_t>(id)] = true;
    }
    for (int id = 0; id < node_count; ++id) {
        if (!present[static_cast<size_t>(id)]) {
            schema_fail(path, fmt::format("missing entry for node {}", id));
        }
    }
    return set;
}

// Integral values render as JSON integers so table literals like 20 and 5
// survive a round trip unchanged.
json number(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9007199254740992.0) {
        return json(static_cast<std::int64_t>(v));
    }
    return json(v);
}

json dump_cpd(const Cpd& cpd) {
    json out = json::object();
    if (const auto* d = std::get_if<DiscreteCpd>(&cpd)) {
        json table = json::array();
        for (const auto& row : d->table) {
            json jrow = json::array();
            for (double p : row) jrow.push_back(number(p));
            table.push_back(std::move(jrow));
        }
        out["table"] = std::move(table);
        return out;
    }
    const auto& g = std::get<ConditionalGaussian>(cpd);
    json rows = json::array();
    for (const GaussianRow& row : g.rows) {
        rows.push_back({{"mu", number(row.mu)}, {"sigma", number(row.sigma)}});
    }
    out["rows"] = std::move(rows);
    if (!g.weights.empty()) {
        json weights = json::array();
        for (double w : g.weights) weights.push_back(number(w));
        out["weights"] = std::move(weights);
    }
    return out;
}

json dump_epoch_block(const EpochCpdSet& set) {
    json block = json::object();
    for (size_t id = 0; id < set.entries.size(); ++id) {
        const NodeCpd& entry = set.entries[id];
        json parents = json::array();
        for (const ParentRef& p : entry.parents) {
            parents.push_back({{"node", p.node}, {"lag", p.lag}});
        }
        block[std::to_string(id)] = {{"parents", std::move(parents)},
                                     {"cpd", dump_cpd(entry.cpd)}};
    }
    return block;
}

}  // namespace

SpecDocument parse_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());  // message carries byte position
    }
    if (!doc.is_object()) schema_fail("$", "expected a JSON object");
    reject_unknown(doc, "$", {"version", "nodes", "epochs", "generation"});

    SpecDocument result;
    result.network.nodes = parse_nodes(require_key(doc, "$", "nodes"));
    const int d = result.network.node_count();

    const json& epochs = require_key(doc, "$", "epochs");
    if (!epochs.is_object()) schema_fail("epochs", "expected an object");
    if (!epochs.contains("steady")) schema_fail("epochs", "missing epoch: steady");
    int numbered = 0;
    for (const auto& [key, value] : epochs.items()) {
        if (key != "steady") ++numbered;
    }
    for (int e = 0; e < numbered; ++e) {
        const std::string key = std::to_string(e);
        if (!epochs.contains(key)) {
            schema_fail("epochs", fmt::format("epochs must be numbered consecutively from 0; missing \"{}\"", key));
        }
        result.network.epochs.push_back(
            parse_epoch_block(epochs[key], fmt::format("epochs.{}", key), d));
    }
    result.network.steady = parse_epoch_block(epochs["steady"], "epochs.steady", d);

    if (doc.contains("generation")) {
        const json& gen = doc["generation"];
        if (!gen.is_object()) schema_fail("generation", "expected an object");
        reject_unknown(gen, "generation", {"T", "N", "seed"});
        GenerationConfig config;
        config.t_len = expect_int(require_key(gen, "generation", "T"), "generation.T");
        config.n_samples = expect_int(require_key(gen, "generation", "N"), "generation.N");
        config.seed = expect_u64(require_key(gen, "generation", "seed"), "generation.seed");
        if (config.t_len < 1) schema_fail("generation.T", "must be >= 1");
        if (config.n_samples < 1) schema_fail("generation.N", "must be >= 1");
        result.generation = config;
    }

    const ValidationReport report = validate_spec(result.network);
    if (!report.valid()) {
        std::ostringstream oss;
        for (size_t i = 0; i < report.violations.size(); ++i) {
            if (i > 0) oss << "; ";
            oss << report.violations[i].message;
        }
        throw SemanticError(oss.str());
    }
    return result;
}

SpecDocument load_spec_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(fmt::format("cannot open {}", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
}

std::string serialize_spec(const SpecDocument& doc) {
    json out = json::object();
    json nodes = json::array();
    for (const NodeSpec& node : doc.network.nodes) {
        json jnode = {{"id", node.id},
                      {"kind", node.kind == NodeKind::Discrete ? "D" : "C"}};
        if (node.levels) jnode["levels"] = *node.levels;
        if (node.name) jnode["name"] = *node.name;
        nodes.push_back(std::move(jnode));
    }
    out["nodes"] = std::move(nodes);
    json epochs = json::object();
    for (size_t e = 0; e < doc.network.epochs.size(); ++e) {
        epochs[std::to_string(e)] = dump_epoch_block(doc.network.epochs[e]);
    }
    epochs["steady"] = dump_epoch_block(doc.network.steady);
    out["epochs"] = std::move(epochs);
    if (doc.generation) {
        out["generation"] = {{"T", doc.generation->t_len},
                             {"N", doc.generation->n_samples},
                             {"seed", doc.generation->seed}};
    }
    return out.dump(2) + "\n";
}

}  // namespace tsgen
