// Exception hierarchy shared by all modules.
#pragma once

#include <stdexcept>
#include <string>

namespace medmediate {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid input data (malformed files, invariant violations at ingestion).
class DataError : public Error {
  public:
    using Error::Error;
};

/// Model fitting failures: rank deficiency, separation, non-convergence,
/// degenerate weights or correlations. Bootstrap resamples that raise this
/// are dropped and recorded rather than aborting the run.
class FitError : public Error {
  public:
    using Error::Error;
};

/// Numerical integration failed to reach the requested tolerance.
class IntegrationError : public Error {
  public:
    IntegrationError(const std::string& msg, double achieved_error)
        : Error(msg), achieved_error(achieved_error) {}
    double achieved_error;
};

/// Caller misuse: invalid configuration, incompatible method/data combinations.
class UsageError : public Error {
  public:
    using Error::Error;
};

}  // namespace medmediate
