#ifndef TSGEN_SPEC_IO_HPP
#define TSGEN_SPEC_IO_HPP

#include <optional>
#include <string>

#include "tsgen/model.hpp"

namespace tsgen {

struct SpecDocument {
    NetworkSpec network;
    std::optional<GenerationConfig> generation;

    bool operator==(const SpecDocument&) const = default;
};

// Strict parse of the JSON spec document. Unknown keys are rejected; every
// error names the offending field path (SchemaError) or byte position
// (ParseError). The returned network has already passed validate_spec;
// violations surface as SemanticError.
//
// Discrete levels are 1-based in the document and in Dataset cells; CPD row
// order is mixed-radix over the parents as listed, first parent most
// significant.
SpecDocument parse_spec(const std::string& text);

SpecDocument load_spec_file(const std::string& path);

// Canonical form: fixed key order, shortest round-trip decimals.
// parse_spec(serialize_spec(doc)) == doc, and equal documents serialize to
// byte-identical text.
std::string serialize_spec(const SpecDocument& doc);

}  // namespace tsgen

#endif
