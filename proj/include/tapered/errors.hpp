#pragma once

#include <stdexcept>
#include <string>

namespace tapered {

/// Parameter outside the mathematical domain of a model object.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller misuse: wrong regime for a check, malformed configuration, bad grid.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Quadrature or factorisation failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested problem size exceeds what can be stored.
class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

} // namespace tapered
