#pragma once

#include <stdexcept>
#include <string>

namespace topicnet {

/// Base of every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands whose shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input data that violates a documented invariant (simplex rows, binary masks, file grammar).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or divergence during a numerical routine.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine exhausted its budget without meeting its tolerance.
class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace topicnet
