#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pairmatch {

// Root of every error the library throws. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that cannot be used at all (bad arguments, malformed files, unknown names).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Numerical or structural failure on otherwise well-formed input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularCovariance : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DimensionMismatch : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OddNodeCount : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonFiniteWeight : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OddPoolForRanking : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A sink-sink pair survived in the augmented matching. Unreachable unless the
// sink weight is wrong.
class InternalSinkPairing : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptySample : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class AllRepsFailed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FailureBudgetExceeded : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TooLarge : public UsageError {
 public:
  using UsageError::UsageError;
};

class InvalidGenerator : public UsageError {
 public:
  using UsageError::UsageError;
};

class UnknownScenario : public UsageError {
 public:
  using UsageError::UsageError;
};

class ParseError : public UsageError {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : UsageError(what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace pairmatch
