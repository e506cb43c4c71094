#pragma once

#include <stdexcept>
#include <string>

namespace derham {

/// Raised when an operation's precondition is violated (dimension or degree
/// mismatch, index out of range, nonpositive radius, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Kernel evaluation requested at (or numerically at) the diagonal x = y.
class SingularEvaluation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Polynomial growth exceeded the configured total-degree cap.
class DegreeCapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// An adaptive quadrature ran out of refinement budget. Carries the last two
/// estimates so that callers can report what was achieved.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double last, double previous)
      : std::runtime_error(what), last_(last), previous_(previous) {}
  double last_estimate() const { return last_; }
  double previous_estimate() const { return previous_; }

 private:
  double last_;
  double previous_;
};

/// Invalid run configuration (schema violation, missing fixture).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace derham
