#pragma once

#include <stdexcept>
#include <string>

namespace tdelay {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnsupportedSymmetry : DomainError {
  using DomainError::DomainError;
};

// Moment requested where the underlying integral diverges.
struct DivergentMoment : DomainError {
  using DomainError::DomainError;
};

// (I + S) too close to singular for the Cayley map; callers resample.
struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cancellation too severe for the working precision.
struct PrecisionLoss : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tdelay
