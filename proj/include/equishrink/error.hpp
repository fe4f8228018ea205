#pragma once

#include <stdexcept>
#include <string>

namespace equishrink {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain where the operation is defined
/// (p < 3 for a shrinkage rule, alpha <= -1, a non-orthogonal matrix, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

/// s = ||u||^2 is zero, so W = ||x||^2 / s is undefined.
class DegenerateScale : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The shrinkage factor is unbounded at the requested point (James-Stein at w = 0).
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Adaptive quadrature could not reach the requested tolerance. The best
/// estimate and its error estimate are kept so callers can decide.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double best_estimate, double error_estimate)
      : Error(what + " (best estimate " + std::to_string(best_estimate) + ", error estimate " +
              std::to_string(error_estimate) + ")"),
        best_estimate_(best_estimate),
        error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

/// Malformed textual specification (rule, density or prior grammar, CSV input).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace equishrink
