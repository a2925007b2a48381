#pragma once

#include <stdexcept>
#include <string>

namespace fklab {

/// Invalid parameters or malformed configuration (maps to exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure at runtime: blow-up, singular systems, non-finite data,
/// quadrature that cannot converge (maps to exit code 3).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Neumann-series radius violation: |theta - theta0| >= 1/2.
class RadiusError : public NumericError {
 public:
  explicit RadiusError(const std::string& what) : NumericError(what) {}
};

}  // namespace fklab
