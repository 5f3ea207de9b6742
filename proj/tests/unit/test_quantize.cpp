#include "doctest.h"

#include <cmath>

#include "bitreg/error.hpp"
#include "bitreg/quantize.hpp"
#include "bitreg/rng.hpp"

using namespace bitreg;

TEST_CASE("upper probability makes the quantizer unbiased") {
  for (int i = 0; i < 1000; ++i) {
    const double lo = -1.0 - 4.0 * uniform01(3, i, 0, StreamTag::Test);
    const double hi = 0.5 + 4.0 * uniform01(3, i, 1, StreamTag::Test);
    const QuantizerRange r(lo, hi);
    const double z = lo + (hi - lo) * uniform01(3, i, 2, StreamTag::Test);
    const double p = upperProbability(z, r);
    CHECK(p * hi + (1 - p) * lo == doctest::Approx(z).epsilon(1e-14));
  }
}

TEST_CASE("endpoints quantize deterministically") {
  const auto r = QuantizerRange::symmetric(2.0);
  CHECK(quantizeScalar(2.0, r, 0.999999).upper);
  CHECK_FALSE(quantizeScalar(-2.0, r, 0.0).upper);
}

TEST_CASE("clamp mode counts and strict mode throws") {
  const auto r = QuantizerRange::symmetric(1.0);
  const auto out = quantizeScalar(3.0, r, 0.5);
  CHECK(out.upper);
  CHECK(out.clamped);
  CHECK_THROWS_AS(quantizeScalar(3.0, r, 0.5, ClampMode::Strict), InvalidArgument);
  CHECK_THROWS_AS(QuantizerRange(1.0, 1.0), InvalidArgument);
}

TEST_CASE("range policies") {
  const auto fixed = resolveRanges(FixedRanges{2.5, 5.0}, 100, 3);
  CHECK(fixed.R() == 2.5);
  CHECK(fixed.L() == 5.0);
  CHECK(fixed.xSq.lower() == 0.0);
  CHECK(fixed.xSq.upper() == 6.25);
  // R_n = sqrt(2 cK (q + 1) log(n d)) at q = 3, n = 1e4, d = 10.
  const auto grown = resolveRanges(SubGaussianLogN{3.0, 1.0, 1.0, 1.0, 1.0, 2.0}, 10000, 10);
  CHECK(grown.R() == doctest::Approx(9.597051824376162).epsilon(1e-13));
  CHECK(grown.L() == doctest::Approx(25.751592315472173).epsilon(1e-13));
  const auto emp = resolveRanges(empiricalFixed(1.0, 1.0), 10, 2);
  CHECK(emp.L() == doctest::Approx(2.5 * std::sqrt(2.0)));
}

TEST_CASE("triplets are regenerable per sample") {
  Eigen::MatrixXd X(3, 2);
  X << 0.1, -0.2, 0.5, 0.7, -0.9, 0.3;
  Eigen::VectorXd y(3);
  y << 1.0, -2.0, 0.5;
  const auto ranges = QuantizerRanges::fromBounds(1.0, 3.0);
  const auto ds = quantizeDataset(X, y, ranges, 42);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(ds.sample(i) == quantizeTriplet(X.row(i).transpose(), y(i), ranges, 42, i));
  }
  CHECK(ds.clampEvents == 0);
  CHECK(ds.xSigns().cwiseAbs().minCoeff() == 1.0);
}

TEST_CASE("monte carlo variance of the quantized square matches R^2 x^2 - x^4") {
  const double R = 1.5, x = 0.8;
  const auto ranges = QuantizerRanges::fromBounds(R, 1.0);
  Eigen::VectorXd xv(1);
  xv << x;
  const int N = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < N; ++i) {
    const auto q = quantizeTriplet(xv, 0.0, ranges, 9, i);
    const double v = q.xSqBits(0) ? R * R : 0.0;
    s += v;
    s2 += v * v;
  }
  const double mean = s / N, var = s2 / N - mean * mean;
  const double expected = R * R * x * x - std::pow(x, 4);
  CHECK(std::abs(mean - x * x) < 5 * std::sqrt(expected / N));
  CHECK(var == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("additive dither form makes the same decisions") {
  // Upper iff z exceeds a threshold drawn uniformly on [l, u].
  const QuantizerRange r(-1.5, 2.0);
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const double z = r.lower() + r.width() * uniform01(4, i, 0, StreamTag::Test);
    const double u = uniform01(4, i, 1, StreamTag::Test);
    const double threshold = r.lower() + u * r.width();
    CHECK(quantizeScalar(z, r, u).upper == (z > threshold));
  }
}
