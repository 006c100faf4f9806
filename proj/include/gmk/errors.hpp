#pragma once

#include <stdexcept>
#include <string>

namespace gmk {

/// Argument outside the mathematical domain of an operation
/// (time past the horizon, backward forecast query, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Structurally invalid input: non-increasing grids, dimension
/// mismatches, violated type invariants.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure (factorization breakdown, singular matrix where a
/// regular inverse is required).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File and stream failures. Kept separate so the CLI can map these to
/// a distinct exit code.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gmk
