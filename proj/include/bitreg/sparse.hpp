#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <limits>
#include <variant>
#include <vector>

#include "bitreg/moments.hpp"
#include "bitreg/quantize.hpp"
#include "bitreg/regress.hpp"

namespace bitreg {

/// Constant step eta; no line search.
struct FixedStep {
  double eta = 0.0;
};

/// Start at `initial` (0 means 1/||sigmaHat||_op) and shrink by `shrink` until
/// the quadratic upper-bound condition holds.
struct Backtracking {
  double initial = 0.0;
  double shrink = 0.5;
};

using StepRule = std::variant<Backtracking, FixedStep>;

/// argmin over ||beta||_1 <= ballRadius of
///   1/2 beta^T sigmaHat beta - beta^T sigmaXyHat + lambda ||beta||_1.
struct LassoConfig {
  double lambda = 0.0;
  double ballRadius = std::numeric_limits<double>::infinity();
  std::size_t maxIter = 20000;
  double tol = 1e-9;
  StepRule stepRule = Backtracking{};

  /// Throws InvalidArgument.
  void validate() const;
};

struct LassoResult {
  Eigen::VectorXd beta;
  bool converged = false;
  std::size_t iterations = 0;
  double fixedPointResidual = 0.0;  // ||beta - T_eta(beta)||_inf
  double objective = 0.0;
  double step = 0.0;  // eta at termination

  /// Indices with beta_j != 0.
  std::vector<std::size_t> support() const;
};

/// sign(z) max(|z| - t, 0).
inline double softThreshold(double z, double t) {
  return z > t ? z - t : (z < -t ? z + t : 0.0);
}
Eigen::VectorXd softThreshold(const Eigen::Ref<const Eigen::VectorXd>& z, double t);

/// Euclidean projection onto {x : ||x||_1 <= radius} (sort-based, O(d log d)).
Eigen::VectorXd projectL1Ball(const Eigen::Ref<const Eigen::VectorXd>& v, double radius);

double lassoObjective(const MomentEstimates& moments, const Eigen::Ref<const Eigen::VectorXd>& beta,
                      double lambda);

/// Projected proximal gradient: beta <- Proj(soft(beta - eta grad, eta lambda)).
/// Stops at a certified fixed point (residual <= tol). After maxIter the best
/// iterate is returned with converged = false. Objective values of accepted
/// iterates never increase under Backtracking, also for indefinite sigmaHat.
/// Throws NonConvergence if the iterates diverge (objective unbounded below).
LassoResult fitLasso(const MomentEstimates& moments, const LassoConfig& cfg);
LassoResult fitLasso(const MomentEstimates& moments, const LassoConfig& cfg,
                     const Eigen::Ref<const Eigen::VectorXd>& start);

// Debiasing.

struct DebiasOptions {
  std::size_t maxSweeps = 5000;
  /// The coordinate-descent penalty is slackFactor * mu so the converged rows
  /// meet the sup-norm constraint strictly.
  double slackFactor = 0.99;
};

struct DebiasMatrix {
  Eigen::MatrixXd M;
  double mu = 0.0;               // constraint level actually met
  double infNormResidual = 0.0;  // max_j ||sigmaHat m_j - e_j||_inf
};

/// Row j minimizes m^T sigmaHat m subject to ||sigmaHat m - e_j||_inf <= mu,
/// computed through its dual 1/2 m^T sigmaHat m - m_j + mu ||m||_1 by cyclic
/// coordinate descent. Rows are solved independently (cold start at
/// e_j / sigmaHat_jj). Throws Infeasible{row, bestResidual} if a row cannot
/// reach the constraint, InvalidArgument unless mu > 0.
DebiasMatrix computeDebiasMatrix(const MomentEstimates& moments, double mu,
                                 const DebiasOptions& opt = {});

/// As above, doubling mu on infeasibility up to `maxDoublings` times.
DebiasMatrix computeDebiasMatrixAdaptive(const MomentEstimates& moments, double mu,
                                         int maxDoublings = 4, const DebiasOptions& opt = {});

/// 0.1 sqrt(log d / n). Requires d >= 2.
double defaultDebiasMu(std::size_t n, std::size_t d);

struct DebiasResult {
  Eigen::VectorXd betaDb;
  Eigen::MatrixXd M;
  Eigen::VectorXd perCoordVar;  // (M V M^T)_jj / n
  Eigen::VectorXd stdErrors;
  std::vector<ConfidenceInterval> ci;
  double level = 0.95;
  double infNormResidual = 0.0;  // ||M sigmaHat - I||_inf (entrywise max)
};

/// betaDb = betaLasso + M (sigmaXyHat - sigmaHat betaLasso) with normal
/// intervals from the residual covariance evaluated at betaLasso.
DebiasResult debias(const MomentEstimates& moments, const Eigen::Ref<const Eigen::VectorXd>& betaLasso,
                    const QuantizedDataset& ds, const Eigen::Ref<const Eigen::MatrixXd>& M,
                    double level = 0.95);

}  // namespace bitreg
