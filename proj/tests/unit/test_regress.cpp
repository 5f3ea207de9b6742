#include "doctest.h"

#include <Eigen/Cholesky>
#include <cmath>

#include "bitreg/error.hpp"
#include "bitreg/moments.hpp"
#include "bitreg/regress.hpp"
#include "bitreg/rng.hpp"

using namespace bitreg;

TEST_CASE("plug-in solve recovers beta from exact moments") {
  MomentEstimates m;
  m.sigmaHat = Eigen::MatrixXd::Identity(3, 3) * 2.0;
  m.sigmaHat(0, 1) = m.sigmaHat(1, 0) = 0.5;
  const Eigen::Vector3d beta(1.0, -2.0, 0.25);
  m.sigmaXyHat = m.sigmaHat * beta;
  m.n = 10;
  double minEig = 0;
  CHECK(solvePlugIn(m, kDefaultPdTolerance, &minEig).isApprox(beta, 1e-14));
  CHECK(minEig == doctest::Approx(1.5));
}

TEST_CASE("indefinite covariance estimates are refused") {
  MomentEstimates m;
  m.sigmaHat = Eigen::Matrix2d{{1.0, 2.0}, {2.0, 1.0}};
  m.sigmaXyHat = Eigen::Vector2d(1.0, 1.0);
  m.n = 5;
  CHECK_THROWS_AS(solvePlugIn(m), NotPositiveDefinite);
  try {
    solvePlugIn(m);
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.minEig() == doctest::Approx(-1.0));
  }
}

TEST_CASE("normal intervals") {
  const Eigen::Vector2d b(1.0, -1.0), se(0.1, 0.2);
  const auto ci = normalIntervals(b, se, 0.95);
  CHECK(ci[0].lower == doctest::Approx(1.0 - 0.1959963984540054));
  CHECK(ci[1].upper == doctest::Approx(-1.0 + 0.3919927969080108));
  CHECK(ci[0].contains(1.0));
  CHECK_THROWS_AS(normalIntervals(b, se, 1.0), InvalidArgument);
}

TEST_CASE("ols matches the normal equations and flags singular designs") {
  Eigen::MatrixXd X(5, 2);
  X << 1, 0, 0, 1, 1, 1, 2, -1, -1, 3;
  const Eigen::VectorXd y = X * Eigen::Vector2d(0.5, -1.5) + Eigen::VectorXd::LinSpaced(5, -0.1, 0.1);
  const auto ols = fitOls(X, y);
  const Eigen::VectorXd expected = (X.transpose() * X).ldlt().solve(X.transpose() * y);
  CHECK(ols.betaHat.isApprox(expected, 1e-12));
  CHECK(ols.sigma2Hat == doctest::Approx(ols.residualSumOfSquares / 3.0));
  Eigen::MatrixXd singular(3, 2);
  singular << 1, 2, 2, 4, 3, 6;
  CHECK_THROWS_AS(fitOls(singular, Eigen::Vector3d(1, 2, 3)), SingularDesign);
}

TEST_CASE("quantized fit on a large gaussian sample") {
  const std::size_t n = 50000, d = 3;
  const Eigen::Vector3d beta(0.5, -0.3, 0.8);
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) X(i, j) = standardNormal(4, i, j, StreamTag::Design);
    y(i) = X.row(i).dot(beta) + standardNormal(4, i, 0, StreamTag::Noise);
  }
  const auto ds = quantizeDataset(X, y, resolveRanges(empiricalFixed(1.0, beta.norm()), n, d), 4);
  const auto fit = fitQuantized(ds);
  CHECK(fit.n == n);
  CHECK(fit.d() == 3);
  CHECK(fit.minEigSigmaHat > 0.5);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(fit.betaHat(j) - beta(j)) < 5 * fit.stdErrors(j));
    CHECK(fit.ci[j].upper - fit.ci[j].lower == doctest::Approx(2 * 1.959963984540054 * fit.stdErrors(j)));
  }
  CHECK(fit.covHat.isApprox(fit.covHat.transpose()));
  // Residuals are centered.
  const auto r = estimatingResiduals(ds, fit.betaHat);
  CHECK(r.rows() == static_cast<Eigen::Index>(n));
  CHECK(relativeEfficiency(2.0, 1.0) == 2.0);
}
