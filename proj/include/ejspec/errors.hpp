#pragma once

#include <stdexcept>
#include <string>

namespace ejspec {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Two elements do not live in the same algebra.
struct DescriptorMismatch : Error {
    using Error::Error;
};

// Malformed input: bad shapes, bad JSON schema, out-of-range parameters.
struct ValidationError : Error {
    using Error::Error;
};

// Jacobi sweep cap exceeded; signals numerically pathological input.
struct EigenSolverFailure : Error {
    using Error::Error;
};

// Simultaneous diagonalization requested for a non-commuting pair.
struct NonCommuting : Error {
    using Error::Error;
};

struct NotIdempotent : Error {
    using Error::Error;
};

struct NotEigenIdempotent : Error {
    using Error::Error;
};

// Query at a point outside the function's domain.
struct DomainViolation : Error {
    using Error::Error;
};

struct NotASubgradient : Error {
    using Error::Error;
};

struct EmptySubdifferential : Error {
    using Error::Error;
};

struct InsufficientSamples : Error {
    using Error::Error;
};

}  // namespace ejspec
