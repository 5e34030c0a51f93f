#pragma once

#include <stdexcept>
#include <string>

namespace dbmc {

// Argument outside the domain of a physical formula (t <= 0, T0 <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The cumulative response integral does not exist (zero distance, m >= 2).
class DivergenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Iterative numeric routine (quadrature, eigen solver, power method) did not
// reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid structured input. `path()` names the offending field, e.g.
// "medium.D" or "positions[3]".
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string path, const std::string& message)
      : std::invalid_argument(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Requested normalization mode is not applicable to the given matrix.
class ModeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Effective-radius threshold is never crossed.
class DegenerateRadiusError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace dbmc
