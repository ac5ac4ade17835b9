#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace isrs {

/// Invalid or inconsistent scenario description: bad band plan, missing noise
/// figure, unsupported option combination.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation that could not produce a trustworthy result (instability,
/// failed root bracketing, iteration that did not converge).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergenceError : public NumericalError {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> history)
      : NumericalError(what), history_(std::move(history)) {}

  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace isrs
