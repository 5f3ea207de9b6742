#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "bitreg/moments.hpp"
#include "bitreg/quantize.hpp"

namespace bitreg {

inline constexpr double kDefaultPdTolerance = 1e-8;

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double value) const { return lower <= value && value <= upper; }
  bool operator==(const ConfidenceInterval&) const = default;
};

struct FitResult {
  Eigen::VectorXd betaHat;
  Eigen::MatrixXd covHat;  // Sigma^-1 V Sigma^-1 / n
  Eigen::VectorXd stdErrors;
  std::vector<ConfidenceInterval> ci;
  double level = 0.95;
  std::size_t n = 0;
  double minEigSigmaHat = 0.0;

  std::size_t d() const { return static_cast<std::size_t>(betaHat.size()); }
};

/// Smallest eigenvalue of a symmetric matrix.
double minEigenvalue(const Eigen::Ref<const Eigen::MatrixXd>& A);

/// Solves sigmaHat * beta = sigmaXyHat after checking that the smallest
/// eigenvalue exceeds pdTolerance. Throws NotPositiveDefinite otherwise; no
/// regularization is applied.
Eigen::VectorXd solvePlugIn(const MomentEstimates& moments, double pdTolerance = kDefaultPdTolerance,
                            double* minEig = nullptr);

/// n x d matrix whose rows are the estimating-function values
///   r_i = Xt_i Yt_i - (Xt_i Xt_i^T + Delta_i) beta.
Eigen::MatrixXd estimatingResiduals(const QuantizedDataset& ds,
                                    const Eigen::Ref<const Eigen::VectorXd>& beta);

/// (1/n) sum_i (r_i - rbar)(r_i - rbar)^T.
Eigen::MatrixXd residualCovariance(const QuantizedDataset& ds,
                                   const Eigen::Ref<const Eigen::VectorXd>& beta);

/// Sigma^-1 V Sigma^-1 / n, symmetrized. Throws NotPositiveDefinite.
Eigen::MatrixXd sandwichCovariance(const QuantizedDataset& ds,
                                   const Eigen::Ref<const Eigen::VectorXd>& betaHat);
/// Same, reusing already computed moments of `ds`.
Eigen::MatrixXd sandwichCovariance(const MomentEstimates& moments, const QuantizedDataset& ds,
                                   const Eigen::Ref<const Eigen::VectorXd>& betaHat,
                                   double pdTolerance = kDefaultPdTolerance);

/// beta_j -+ z_{1-(1-level)/2} se_j.
std::vector<ConfidenceInterval> normalIntervals(const Eigen::Ref<const Eigen::VectorXd>& beta,
                                                const Eigen::Ref<const Eigen::VectorXd>& stdErrors,
                                                double level);

/// Plug-in fit with sandwich standard errors and intervals at `level`.
FitResult fitQuantized(const QuantizedDataset& ds, double level = 0.95,
                       double pdTolerance = kDefaultPdTolerance);
FitResult fitQuantized(const MomentEstimates& moments, const QuantizedDataset& ds,
                       double level = 0.95, double pdTolerance = kDefaultPdTolerance);

// Full-precision least squares.

struct OlsResult {
  Eigen::VectorXd betaHat;
  Eigen::MatrixXd covHat;  // sigma2Hat (X^T X)^-1
  double sigma2Hat = 0.0;  // RSS / (n - d); NaN when n == d
  double residualSumOfSquares = 0.0;
  std::size_t n = 0;
};

/// Throws SingularDesign when X does not have full column rank.
OlsResult fitOls(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXd>& y);

/// quantizedMse / olsMse. Throws InvalidArgument unless olsMse > 0.
double relativeEfficiency(double quantizedMse, double olsMse);

}  // namespace bitreg
