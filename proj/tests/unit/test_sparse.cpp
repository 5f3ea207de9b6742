#include "doctest.h"

#include <Eigen/Cholesky>
#include <cmath>

#include "bitreg/error.hpp"
#include "bitreg/sparse.hpp"

using namespace bitreg;

namespace {

MomentEstimates identityMoments(const Eigen::VectorXd& cross, std::size_t n = 1000) {
  MomentEstimates m;
  m.sigmaHat = Eigen::MatrixXd::Identity(cross.size(), cross.size());
  m.sigmaXyHat = cross;
  m.n = n;
  return m;
}

}  // namespace

TEST_CASE("soft thresholding and l1 projection") {
  CHECK(softThreshold(3.0, 1.0) == 2.0);
  CHECK(softThreshold(-0.5, 1.0) == 0.0);
  CHECK(softThreshold(-3.0, 1.0) == -2.0);
  const Eigen::Vector3d v(3.0, -1.0, 0.5);
  CHECK(projectL1Ball(v, 10.0) == v);
  const auto p = projectL1Ball(v, 2.0);
  CHECK(p.lpNorm<1>() == doctest::Approx(2.0));
  CHECK(p.isApprox(Eigen::Vector3d(2.0, 0.0, 0.0)));
}

TEST_CASE("lasso with identity covariance is soft thresholding") {
  const Eigen::Vector4d c(1.0, -0.2, 0.05, -2.0);
  LassoConfig cfg;
  cfg.lambda = 0.1;
  const auto r = fitLasso(identityMoments(c), cfg);
  CHECK(r.converged);
  CHECK(r.beta.isApprox(softThreshold(c, 0.1), 1e-9));
  CHECK(r.support() == std::vector<std::size_t>{0, 1, 3});
  CHECK(r.fixedPointResidual <= cfg.tol);
}

TEST_CASE("fixed step and ball constraint") {
  MomentEstimates m;
  m.sigmaHat = Eigen::Matrix2d{{2.0, 0.5}, {0.5, 1.0}};
  m.sigmaXyHat = Eigen::Vector2d(1.0, 1.0);
  m.n = 100;
  LassoConfig cfg;
  cfg.stepRule = FixedStep{0.3};
  const auto r = fitLasso(m, cfg);
  CHECK(r.converged);
  CHECK(r.beta.isApprox(m.sigmaHat.ldlt().solve(m.sigmaXyHat), 1e-8));
  cfg.ballRadius = 0.2;
  const auto constrained = fitLasso(m, cfg);
  CHECK(constrained.beta.lpNorm<1>() <= 0.2 + 1e-12);
  cfg.lambda = -1.0;
  CHECK_THROWS_AS(fitLasso(m, cfg), InvalidArgument);
}

TEST_CASE("too large a fixed step diverges") {
  MomentEstimates m = identityMoments(Eigen::Vector2d(1.0, 1.0));
  m.sigmaHat *= 10.0;
  LassoConfig cfg;
  cfg.stepRule = FixedStep{1.0};
  CHECK_THROWS_AS(fitLasso(m, cfg), NonConvergence);
}

TEST_CASE("debias matrix is within the constraint of the inverse") {
  const double mu = 0.05;
  const auto m = identityMoments(Eigen::Vector3d(0.1, 0.2, 0.3));
  const auto M = computeDebiasMatrix(m, mu);
  CHECK(M.infNormResidual <= mu + 1e-12);
  // With sigmaHat = I the minimizer shrinks toward zero by at most mu.
  CHECK((M.M - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= mu + 1e-12);
  CHECK_THROWS_AS(computeDebiasMatrix(m, 0.0), InvalidArgument);
}

TEST_CASE("infeasible constraint is reported and the adaptive variant doubles mu") {
  MomentEstimates m;
  m.sigmaHat = Eigen::Matrix2d{{1.0, 1.0}, {1.0, 1.0}};  // singular
  m.sigmaXyHat = Eigen::Vector2d(1.0, 1.0);
  m.n = 100;
  CHECK_THROWS_AS(computeDebiasMatrix(m, 0.01), Infeasible);
  const auto M = computeDebiasMatrixAdaptive(m, 0.1, 4);
  CHECK(M.mu >= 0.1);
  CHECK(M.infNormResidual <= M.mu + 1e-12);
  CHECK(defaultDebiasMu(10000, 40) == doctest::Approx(0.1 * std::sqrt(std::log(40.0) / 10000.0)));
}
