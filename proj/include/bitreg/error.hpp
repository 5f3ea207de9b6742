#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bitreg {

// Error taxonomy. The CLI maps InvalidArgument to exit 1, DataError to exit 2
// and NumericalError (plus subclasses) to exit 3.

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input data or a corrupt/unsupported file.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The plug-in covariance estimate is not positive definite; usually n is too
/// small relative to d. Retrying with more samples is the expected remedy.
class NotPositiveDefinite : public NumericalError {
 public:
  explicit NotPositiveDefinite(double minEig)
      : NumericalError("covariance estimate not positive definite (min eigenvalue " +
                       std::to_string(minEig) + ")"),
        minEig_(minEig) {}
  double minEig() const { return minEig_; }

 private:
  double minEig_;
};

class SingularDesign : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// No row of the approximate inverse meets the sup-norm constraint at this mu.
class Infeasible : public NumericalError {
 public:
  Infeasible(std::size_t row, double bestResidual)
      : NumericalError("debias constraint infeasible at row " + std::to_string(row) +
                       " (best residual " + std::to_string(bestResidual) + ")"),
        row_(row),
        bestResidual_(bestResidual) {}
  std::size_t row() const { return row_; }
  double bestResidual() const { return bestResidual_; }

 private:
  std::size_t row_;
  double bestResidual_;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace bitreg
