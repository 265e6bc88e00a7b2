#ifndef TSGEN_ERRORS_HPP
#define TSGEN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tsgen {

// Malformed input text (bad JSON, unreadable file).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid JSON that does not match the spec-file schema.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// Schema-conformant document that fails network validation.
struct SemanticError : std::runtime_error {
    explicit SemanticError(const std::string& msg) : std::runtime_error(msg) {}
};

// Lag-0 parent relation contains a cycle.
struct CycleError : std::runtime_error {
    explicit CycleError(const std::string& msg) : std::runtime_error(msg) {}
};

// A discrete value fell outside its declared 1..K range.
struct RangeError : std::runtime_error {
    explicit RangeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Sampling primitive given an invalid distribution (bad row sum, sigma <= 0).
struct InvalidDistribution : std::runtime_error {
    explicit InvalidDistribution(const std::string& msg) : std::runtime_error(msg) {}
};

// Network does not have the two-node hidden-chain shape hmm-eval requires.
struct NotAnHmm : std::runtime_error {
    explicit NotAnHmm(const std::string& msg) : std::runtime_error(msg) {}
};

// Dataset shape disagrees with the network it is checked against.
struct StructureMismatch : std::runtime_error {
    explicit StructureMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

// Invariant breach inside the sampler (a parent read before it was written).
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace tsgen

#endif
