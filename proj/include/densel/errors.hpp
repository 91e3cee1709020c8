#pragma once

#include <stdexcept>
#include <string>

namespace densel {

/// Argument outside the support of a density, or otherwise outside the domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation at a point where the density is unbounded (power law at 0).
class UnboundedPoint : public DomainError {
 public:
  using DomainError::DomainError;
};

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sample too small for a formula that divides by n - 1.
class DegenerateSample : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

class UnsupportedPair : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

class InvalidScheme : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Quadrature failed to reach the requested tolerance.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double error_estimate)
      : std::runtime_error(what), error_estimate_(error_estimate) {}
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

/// The slope path has a single segment, so there is no jump to detect.
class NoJump : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace densel
