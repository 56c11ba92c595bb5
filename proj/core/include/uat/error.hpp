#pragma once

#include <stdexcept>
#include <string>

namespace uat {

// Base of every error thrown by the library. The CLI maps subclasses of
// PreconditionError to exit code 2 and anything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Value outside the mathematical domain of an operation (non-finite input,
// eps <= 0, empty vector, ...).
class DomainError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Vector or matrix dimensions disagree.
class ShapeError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Structurally valid input that the operation does not accept (wrong
// activation kind, softmax head present, mismatched operands).
class InvalidInputError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Requested dimension is beyond what a deterministic grid can handle.
class UseMonteCarloError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// A construction could not meet its error budget within the configured caps.
class BudgetInfeasibleError : public PreconditionError {
 public:
  BudgetInfeasibleError(const std::string& what, double achieved)
      : PreconditionError(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double achieved_tolerance)
      : Error(what), achieved_tolerance_(achieved_tolerance) {}
  double achieved_tolerance() const noexcept { return achieved_tolerance_; }

 private:
  double achieved_tolerance_;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class ParseError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

}  // namespace uat
