#pragma once

#include <stdexcept>
#include <string>

namespace ctfl {

/// Argument outside the mathematical domain of a function (negative x, a > b).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed base/alphabet/level description, or an operation applied to a
/// spec it does not accept (e.g. a shift decomposition of a non reverse
/// canonical alphabet).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Explicit interval enumeration would exceed the configured cap.
class CapExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

/// A ratio whose denominator vanished in floating point.
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ctfl
