#ifndef TSGEN_DATASET_IO_HPP
#define TSGEN_DATASET_IO_HPP

#include <cstdint>
#include <string>

#include "tsgen/model.hpp"

namespace tsgen {

// Long-format CSV: header "sample,t,<col>..." with one row per (sample, t).
// Discrete cells render as 1-based integers, continuous cells as shortest
// round-trip decimals. Column names come from NodeSpec.name, falling back
// to u<i>.
std::string dataset_to_csv(const Dataset& dataset, const NetworkSpec& spec);

// Reads the long-format CSV back; throws ParseError (malformed rows) or
// StructureMismatch (column count disagrees with the network).
Dataset dataset_from_csv(const std::string& text, const NetworkSpec& spec);

// Nested-array JSON [sample][t][node] plus a metadata header carrying the
// canonical spec hash, seed, T, and N.
std::string dataset_to_json(const Dataset& dataset, const NetworkSpec& spec,
                            std::uint64_t seed);

// FNV-1a hash of the canonical spec serialization, as fixed-width hex.
std::string spec_hash(const NetworkSpec& spec);

}  // namespace tsgen

#endif
