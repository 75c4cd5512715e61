#pragma once

#include <stdexcept>
#include <string>

namespace skirmish {

// Invalid scenario/env/experiment configuration or shape mismatch.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Wrong call shape: mismatched command counts, unknown agent index, etc.
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An action the mask (or liveness) forbids.
struct IllegalActionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// DSL syntax or semantic rejection, with source location.
struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& what, int line_, int column_)
        : std::runtime_error(what + " (line " + std::to_string(line_) + ", col " +
                             std::to_string(column_) + ")"),
          line(line_),
          column(column_) {}
};

// File read/write failures.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Text-provider transport failure (retriable).
struct ProviderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Provider output failed validation after all repair attempts.
struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace skirmish
