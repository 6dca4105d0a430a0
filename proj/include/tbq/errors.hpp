#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tbq {

/// Invalid parameters or configuration. `what()` lists every violation,
/// one per line, each naming the offending field.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Not enough events to form the requested estimate.
class InsufficientStatistics : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fit that failed to converge. Carries the last weighted residual.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& msg, double residual)
      : std::runtime_error(msg), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace tbq
