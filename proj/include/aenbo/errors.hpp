#ifndef AENBO_ERRORS_HPP
#define AENBO_ERRORS_HPP
#pragma once

#include <stdexcept>
#include <string>

namespace aenbo {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Points or matrices whose dimensions do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A hyperparameter or argument outside its admissible range.
class ParamError : public Error {
public:
    using Error::Error;
};

/// No jitter level up to the cap produced a Cholesky factor, or a strict
/// factorization was refused.
class FactorizationError : public Error {
public:
    FactorizationError(const std::string& what, double min_eigenvalue)
        : Error(what), min_eigenvalue_(min_eigenvalue) {}

    [[nodiscard]] double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

/// Every restart of a likelihood fit failed.
class FitError : public Error {
public:
    using Error::Error;
};

class BoError : public Error {
public:
    BoError(const std::string& what, int iteration)
        : Error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}

    [[nodiscard]] int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

class EmptyHistoryError : public Error {
public:
    using Error::Error;
};

/// Objective evaluated outside its active box.
class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// An external objective failed too many times in a row.
class ExternalAbortError : public Error {
public:
    using Error::Error;
};

} // namespace aenbo

#endif // AENBO_ERRORS_HPP
