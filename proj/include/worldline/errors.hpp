#pragma once

#include <stdexcept>
#include <string>

namespace worldline {

// Base class for everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid input: bad constants, malformed expressions or CSV, infeasible
// trajectories, out-of-domain arguments. Maps to CLI exit code 1.
struct InputError : Error {
    using Error::Error;
};

// Numerical failure on otherwise valid input: non-finite integrand samples,
// spacelike worldsheet nodes. Maps to CLI exit code 2.
struct NumericalError : Error {
    using Error::Error;
};

// Lexical or syntax failure; `position` is the byte offset into the source
// text of the offending character or token.
struct ParseError : InputError {
    ParseError(const std::string& msg, std::size_t pos)
        : InputError(msg + " at position " + std::to_string(pos)), position(pos) {}
    std::size_t position;
};

// Evaluation hit a point outside a sub-expression's domain (sqrt of a
// negative value, division by zero, overflow).
struct EvalError : InputError {
    EvalError(const std::string& msg, std::string subexpr, double at_t)
        : InputError(msg + " in '" + subexpr + "' at t=" + std::to_string(at_t)),
          subexpression(std::move(subexpr)),
          at(at_t) {}
    std::string subexpression;
    double at;
};

}  // namespace worldline
