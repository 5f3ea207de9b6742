#include "bitreg/regress.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <limits>

#include "bitreg/error.hpp"
#include "bitreg/normal.hpp"

namespace bitreg {

double minEigenvalue(const Eigen::Ref<const Eigen::MatrixXd>& A) {
  if (A.rows() == 0 || A.rows() != A.cols()) throw InvalidArgument("expected a nonempty square matrix");
  if (A.rows() == 1) return A(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

namespace {

Eigen::LDLT<Eigen::MatrixXd> checkedFactor(const Eigen::MatrixXd& sigmaHat, double pdTolerance,
                                           double* minEig) {
  if (!sigmaHat.allFinite()) throw NumericalError("covariance estimate has non-finite entries");
  const double lambdaMin = minEigenvalue(sigmaHat);
  if (minEig) *minEig = lambdaMin;
  if (!(lambdaMin > pdTolerance)) throw NotPositiveDefinite(lambdaMin);
  return Eigen::LDLT<Eigen::MatrixXd>(sigmaHat);
}

}  // namespace

Eigen::VectorXd solvePlugIn(const MomentEstimates& moments, double pdTolerance, double* minEig) {
  const auto ldlt = checkedFactor(moments.sigmaHat, pdTolerance, minEig);
  Eigen::VectorXd beta = ldlt.solve(moments.sigmaXyHat);
  // One refinement step keeps the estimating-equation residual at rounding level.
  beta += ldlt.solve(moments.sigmaXyHat - moments.sigmaHat * beta);
  return beta;
}

Eigen::MatrixXd estimatingResiduals(const QuantizedDataset& ds,
                                    const Eigen::Ref<const Eigen::VectorXd>& beta) {
  ds.validate();
  if (beta.size() != static_cast<Eigen::Index>(ds.d())) throw InvalidArgument("beta has wrong dimension");
  if (!beta.allFinite()) throw InvalidArgument("beta must be finite");
  const double R = ds.ranges.R();
  const double L = ds.ranges.L();
  const Eigen::MatrixXd S = ds.xSigns();
  const Eigen::VectorXd t = ds.ySigns();
  const Eigen::VectorXd fitted = S * beta;
  // Delta_i = R^2 diag(q_ij - 1) with q the x^2 bits.
  const Eigen::ArrayXXd qMinusOne = ds.xSqBits.cast<double>().array() - 1.0;
  Eigen::MatrixXd r = (R * L) * (S.array().colwise() * t.array()) -
                      (R * R) * (S.array().colwise() * fitted.array()) -
                      (R * R) * (qMinusOne.rowwise() * beta.transpose().array());
  return r;
}

Eigen::MatrixXd residualCovariance(const QuantizedDataset& ds,
                                   const Eigen::Ref<const Eigen::VectorXd>& beta) {
  if (ds.n() == 0) throw InvalidArgument("residual covariance requires n >= 1");
  Eigen::MatrixXd r = estimatingResiduals(ds, beta);
  r.rowwise() -= r.colwise().mean();
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(r.cols(), r.cols());
  V.selfadjointView<Eigen::Lower>().rankUpdate(r.transpose(), 1.0 / static_cast<double>(ds.n()));
  return V.selfadjointView<Eigen::Lower>();
}

Eigen::MatrixXd sandwichCovariance(const MomentEstimates& moments, const QuantizedDataset& ds,
                                   const Eigen::Ref<const Eigen::VectorXd>& betaHat,
                                   double pdTolerance) {
  const auto ldlt = checkedFactor(moments.sigmaHat, pdTolerance, nullptr);
  const Eigen::MatrixXd V = residualCovariance(ds, betaHat);
  const Eigen::MatrixXd left = ldlt.solve(V);  // Sigma^-1 V
  Eigen::MatrixXd cov = ldlt.solve(left.transpose());
  cov /= static_cast<double>(ds.n());
  return 0.5 * (cov + cov.transpose());
}

Eigen::MatrixXd sandwichCovariance(const QuantizedDataset& ds,
                                   const Eigen::Ref<const Eigen::VectorXd>& betaHat) {
  return sandwichCovariance(estimateMoments(ds), ds, betaHat);
}

std::vector<ConfidenceInterval> normalIntervals(const Eigen::Ref<const Eigen::VectorXd>& beta,
                                                const Eigen::Ref<const Eigen::VectorXd>& stdErrors,
                                                double level) {
  if (beta.size() != stdErrors.size()) throw InvalidArgument("beta and stdErrors differ in size");
  const double z = normalCriticalValue(level);
  std::vector<ConfidenceInterval> out(static_cast<std::size_t>(beta.size()));
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    out[static_cast<std::size_t>(j)] = {beta(j) - z * stdErrors(j), beta(j) + z * stdErrors(j)};
  }
  return out;
}

FitResult fitQuantized(const MomentEstimates& moments, const QuantizedDataset& ds, double level,
                       double pdTolerance) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("level must lie in (0, 1)");
  if (moments.d() != ds.d() || moments.n != ds.n()) {
    throw InvalidArgument("moments do not belong to this dataset");
  }
  FitResult fit;
  fit.level = level;
  fit.n = ds.n();
  fit.betaHat = solvePlugIn(moments, pdTolerance, &fit.minEigSigmaHat);
  fit.covHat = sandwichCovariance(moments, ds, fit.betaHat, pdTolerance);
  fit.stdErrors = fit.covHat.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.ci = normalIntervals(fit.betaHat, fit.stdErrors, level);
  return fit;
}

FitResult fitQuantized(const QuantizedDataset& ds, double level, double pdTolerance) {
  return fitQuantized(estimateMoments(ds), ds, level, pdTolerance);
}

OlsResult fitOls(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (X.rows() != y.size()) throw InvalidArgument("X and y have different numbers of rows");
  if (X.cols() == 0 || X.rows() < X.cols()) throw SingularDesign("design needs n >= d >= 1");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) throw SingularDesign("design matrix is rank deficient");
  OlsResult out;
  out.n = static_cast<std::size_t>(X.rows());
  out.betaHat = qr.solve(y);
  out.residualSumOfSquares = (y - X * out.betaHat).squaredNorm();
  const auto dof = X.rows() - X.cols();
  out.sigma2Hat = dof > 0 ? out.residualSumOfSquares / static_cast<double>(dof)
                          : std::numeric_limits<double>::quiet_NaN();
  // (X^T X)^-1 = P R^-1 R^-T P^T from the pivoted QR.
  const auto d = X.cols();
  const Eigen::MatrixXd Rtri = qr.matrixR().topLeftCorner(d, d).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd Rinv =
      Rtri.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(d, d));
  const Eigen::MatrixXd inner = Rinv * Rinv.transpose();
  const auto& P = qr.colsPermutation();
  out.covHat = out.sigma2Hat * (P * inner * P.transpose());
  return out;
}

double relativeEfficiency(double quantizedMse, double olsMse) {
  if (!(olsMse > 0.0) || !std::isfinite(olsMse)) throw InvalidArgument("olsMse must be positive");
  return quantizedMse / olsMse;
}

}  // namespace bitreg
