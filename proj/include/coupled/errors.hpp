#pragma once

#include <stdexcept>
#include <string>

namespace coupled {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (x <= 0 for a
/// logarithm, sigma <= 0, u outside (0,1], malformed distributions).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at a pole such as 1 + kappa*y = 0 or q = 2.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Parameter combination the library deliberately does not cover.
class UnsupportedError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Probability vector or ensemble with no usable mass.
class DegenerateError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Integral or moment that does not exist (heavy tail, support mismatch).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Iterative procedure that did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Simulation left its numerically stable regime.
class UnstableError : public Error {
 public:
  using Error::Error;
};

}  // namespace coupled
