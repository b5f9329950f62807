#pragma once

#include <stdexcept>
#include <string>

namespace ehfbl {

// Caller passed a value outside the mathematical domain of an operation
// (nonpositive variance, epsilon outside (0,1), blocklength too small, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input text could not be understood: malformed JSON, unknown config keys,
// wrong JSON types. Distinct from ValidationError so the CLI can map parse
// problems and numeric failures to one exit code and bad values to another.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical routine failed to meet its own accuracy contract
// (non-convergent root solve, quadrature self-check miss, MC cross-check miss).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ehfbl
