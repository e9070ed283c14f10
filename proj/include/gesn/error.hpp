#pragma once

#include <stdexcept>
#include <string>

namespace gesn {

/// Bad arguments or configuration supplied by the caller (CLI exit code 1).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data (CLI exit code 2).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure: non-convergence, singular systems, divergence (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double last_estimate = 0.0)
        : std::runtime_error(what), last_estimate_(last_estimate) {}

    /// Last iterate of the failing estimator, when one exists.
    double last_estimate() const noexcept { return last_estimate_; }

private:
    double last_estimate_;
};

} // namespace gesn
