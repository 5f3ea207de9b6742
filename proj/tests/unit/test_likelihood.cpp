#include "doctest.h"

#include <cmath>

#include "bitreg/error.hpp"
#include "bitreg/likelihood.hpp"

using namespace bitreg;

TEST_CASE("collision probability reference values") {
  const ScalarModel m{1.0, 1.0, 2.5, 4.0};
  CHECK(collisionProbability(m) == doctest::Approx(0.5491694509830791).epsilon(1e-12));
  CHECK(collisionProbability(m.withBeta(0.5)) == doctest::Approx(0.5246814085504667).epsilon(1e-12));
  CHECK(std::abs(collisionProbability(m.withBeta(0.0)) - 0.5) < 1e-12);
}

TEST_CASE("the two quadrature routes agree") {
  for (const double beta : {-1.0, 0.3, 2.0}) {
    const ScalarModel m{beta, 0.7, 2.0, 3.0};
    CHECK(collisionProbabilityNested(m) == doctest::Approx(collisionProbability(m)).epsilon(1e-6));
  }
}

TEST_CASE("collision probability is odd about one half and increasing") {
  const ScalarModel m{0.8, 1.0, 2.0, 3.0};
  CHECK(collisionProbability(m) + collisionProbability(m.withBeta(-0.8)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(collisionProbabilityDerivative(m) > 0.0);
  CHECK(collisionProbabilityDerivative(m) ==
        doctest::Approx(collisionProbabilityDerivative(m, DerivativeStencil::FivePoint)).epsilon(1e-6));
}

TEST_CASE("orthant probability special cases") {
  const ScalarModel m{0.0, 1.0, 1.0, 1.0};
  // Independent coordinates: P(X > 0) P(Y > 0) = 1/4.
  CHECK(orthantProbability(0.0, 0.0, m) == doctest::Approx(0.25).epsilon(1e-9));
  const ScalarModel corr{1.0, 1.0, 1.0, 1.0};
  // Correlation 1/sqrt 2: 1/4 + asin(rho) / (2 pi) = 3/8.
  CHECK(orthantProbability(0.0, 0.0, corr) == doctest::Approx(0.375).epsilon(1e-9));
}

TEST_CASE("Fisher information scaled by L^2 R^2 stays bounded") {
  const double expected[4] = {0.885525, 0.995632, 1.000155, 1.000027};
  const double RL[4][2] = {{2, 3}, {3, 5}, {5, 8}, {8, 12}};
  for (int k = 0; k < 4; ++k) {
    const ScalarModel m{0.5, 1.0, RL[k][0], RL[k][1]};
    const double scaled = fisherInformation(m).information * RL[k][0] * RL[k][0] * RL[k][1] * RL[k][1];
    CHECK(scaled == doctest::Approx(expected[k]).epsilon(1e-5));
  }
}

TEST_CASE("simulated collisions agree with the quadrature") {
  const ScalarModel m{1.0, 1.0, 2.5, 4.0};
  const std::size_t n = 200000;
  const double pi = collisionProbability(m);
  const double freq = static_cast<double>(simulateCollisions(m, n, 17)) / n;
  CHECK(std::abs(freq - pi) < 4.0 * std::sqrt(pi * (1 - pi) / n));
}

TEST_CASE("maximum likelihood") {
  const ScalarModel ctx{0.0, 1.0, 2.5, 4.0};
  const std::size_t n = 100000;
  const std::size_t k = static_cast<std::size_t>(std::llround(collisionProbability(ctx.withBeta(0.7)) * n));
  const auto fit = fitMle(k, n, ctx, -5.0, 5.0);
  CHECK(fit.beta == doctest::Approx(0.7).epsilon(1e-3));
  CHECK_FALSE(fit.atBoundary);
  CHECK(fit.logLikelihood >= logLikelihood(k, n, 0.6, ctx));
  const auto edge = fitMle(n, n, ctx, -1.0, 1.0);
  CHECK(edge.atBoundary);
  CHECK(edge.beta == doctest::Approx(1.0));
  CHECK(logLikelihood(0, 0, 0.3, ctx) == 0.0);
  CHECK_THROWS_AS(logLikelihood(5, 4, 0.3, ctx), InvalidArgument);
  CHECK_THROWS_AS(collisionProbability({0.0, -1.0, 1.0, 1.0}), InvalidArgument);
}
