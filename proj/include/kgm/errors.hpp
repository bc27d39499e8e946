#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kgm {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Parameters fail the existence hypotheses for constant potentials.
class AdmissibilityError : public Error {
public:
  using Error::Error;
};

/// The coercivity system has no solution (empty epsilon interval).
class InfeasibleError : public Error {
public:
  using Error::Error;
};

/// Mountain-pass geometry could not be realized (no descent endpoint).
class GeometryError : public Error {
public:
  using Error::Error;
};

/// An iterative method or quadrature failed; carries its history.
class NumericalError : public Error {
public:
  NumericalError(const std::string &what, std::vector<double> history = {})
      : Error(what), history_(std::move(history)) {}

  const std::vector<double> &history() const noexcept { return history_; }

private:
  std::vector<double> history_;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace kgm
