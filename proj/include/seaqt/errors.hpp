#pragma once

#include <stdexcept>
#include <string>

namespace seaqt {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input values (negative rates, non-finite numbers, bad sizes).
class ArgumentError : public Error {
public:
  using Error::Error;
};

/// Operator dimensions do not match.
class DimensionError : public ArgumentError {
public:
  using ArgumentError::ArgumentError;
};

/// A state failed the density-operator contract (trace, positivity, hermiticity).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// An observable has zero spread where a finite spread is required.
class DegenerateSpreadError : public Error {
public:
  using Error::Error;
};

/// The constraint directions sqrt(rho)*dH, sqrt(rho)*dN_i are (nearly) dependent.
class DegenerateGeneratorsError : public Error {
public:
  using Error::Error;
};

/// The constraint solve produced theta = 0.
class SingularTemperatureError : public Error {
public:
  using Error::Error;
};

/// No canonical solution exists for the requested mean energy.
class NoSolutionError : public Error {
public:
  using Error::Error;
};

/// Numerical breakdown during integration (positivity loss, step underflow).
/// Carries the last time for which a valid state was produced.
class IntegrationError : public Error {
public:
  IntegrationError(const std::string& what, double last_good_time)
      : Error(what), last_good_time_(last_good_time) {}
  double last_good_time() const { return last_good_time_; }

private:
  double last_good_time_;
};

/// Problems with run configuration files or CLI arguments.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace seaqt
