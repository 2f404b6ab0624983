#pragma once

#include <stdexcept>
#include <string>

namespace lyadim {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid parameters, malformed configuration, violated preconditions.
// The CLI maps this to exit code 2.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

// Numeric failure: conditioning limits, singular factors, non-convergence.
// The CLI maps this to exit code 3.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what) {}
};

// Integration failure. Carries the time at which the step failed.
class IntegrationError : public NumericError {
public:
    IntegrationError(const std::string& what, double time)
        : NumericError(what + " (t = " + std::to_string(time) + ")"), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

// A factor chain contained an exactly singular matrix.
class SingularFactorError : public NumericError {
public:
    SingularFactorError(const std::string& what, int factor_index)
        : NumericError(what + " (factor " + std::to_string(factor_index) + ")"),
          factor_index_(factor_index) {}
    int factor_index() const { return factor_index_; }

private:
    int factor_index_;
};

} // namespace lyadim
