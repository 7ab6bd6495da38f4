#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace navfuse {

// Bad configuration: unknown keys, out-of-range values, missing files.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input data (CSV rows, timestamps, shapes).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: indefinite innovation covariance, covariance losing
// positive semidefiniteness, diverging training loss. Carries optional
// diagnostics (e.g. the eigenvalues at the point of failure).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what,
                          std::vector<double> diagnostics = {})
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

  const std::vector<double>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<double> diagnostics_;
};

}  // namespace navfuse
