#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dode {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Syntax error while parsing an expression or a problem file.
struct ParseError : Error {
    std::size_t offset;
    ParseError(std::size_t off, const std::string& msg)
        : Error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

/// Numeric evaluation failed (unbound variable or domain violation).
struct EvalError : Error {
    using Error::Error;
};

struct UnboundVariableError : EvalError {
    explicit UnboundVariableError(const std::string& name)
        : EvalError("unbound variable: " + name) {}
};

struct DomainError : EvalError {
    using EvalError::EvalError;
};

/// A shift would move a jet variable outside the supported level range.
struct LevelOverflowError : Error {
    using Error::Error;
};

/// A total derivative would need a fourth-order jet variable.
struct OrderOverflowError : Error {
    using Error::Error;
};

/// An equation is not affine in the variable it must be solved for.
struct NonAffineError : Error {
    using Error::Error;
};

/// A theorem hypothesis does not hold for the given data.
struct HypothesisError : Error {
    using Error::Error;
};

/// Input data violates a structural precondition.
struct ValidationError : Error {
    using Error::Error;
};

}  // namespace dode
