#include "doctest.h"

#include "bitreg/error.hpp"
#include "bitreg/moments.hpp"
#include "bitreg/rng.hpp"

using namespace bitreg;

namespace {

struct Data {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

Data gaussianData(std::size_t n, std::size_t d, std::uint64_t seed) {
  Data out{Eigen::MatrixXd(n, d), Eigen::VectorXd(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) out.X(i, j) = standardNormal(seed, i, j, StreamTag::Test);
    out.y(i) = out.X.row(i).sum() + standardNormal(seed, i, 77, StreamTag::Test);
  }
  return out;
}

}  // namespace

TEST_CASE("batch and streaming accumulation agree bit for bit") {
  const auto data = gaussianData(500, 4, 1);
  const auto ds = quantizeDataset(data.X, data.y, QuantizerRanges::fromBounds(2.5, 6.0), 3);
  MomentAccumulator a(4, ds.ranges), b(4, ds.ranges), c(4, ds.ranges);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    accumulateMoments(a, ds.sample(i));
    (i < 200 ? b : c).add(ds.sample(i));
  }
  b.merge(c);
  const auto batch = estimateMoments(ds);
  const auto streamed = a.finalize();
  const auto merged = b.finalize();
  CHECK(batch.sigmaHat == streamed.sigmaHat);
  CHECK(batch.sigmaXyHat == streamed.sigmaXyHat);
  CHECK(merged.sigmaHat == streamed.sigmaHat);
  CHECK(batch.n == 500);
  CHECK(batch.sigmaHat == batch.sigmaHat.transpose());
}

TEST_CASE("values at the quantizer endpoints give the exact sample moments") {
  const double R = 2.0, L = 3.0;
  Eigen::MatrixXd X(4, 2);
  X << R, -R, -R, -R, R, R, -R, R;
  Eigen::VectorXd y(4);
  y << L, -L, -L, L;
  const auto m = estimateMoments(quantizeDataset(X, y, QuantizerRanges::fromBounds(R, L), 8));
  CHECK(m.sigmaHat.isApprox(X.transpose() * X / 4.0, 1e-15));
  CHECK(m.sigmaXyHat.isApprox(X.transpose() * y / 4.0, 1e-15));
}

TEST_CASE("misuse is reported") {
  MomentAccumulator a(2, QuantizerRanges::fromBounds(1, 1));
  CHECK_THROWS_AS(a.finalize(), InvalidArgument);
  MomentAccumulator b(3, QuantizerRanges::fromBounds(1, 1));
  CHECK_THROWS_AS(a.merge(b), InvalidArgument);
  MomentAccumulator c(2, QuantizerRanges::fromBounds(2, 1));
  CHECK_THROWS_AS(a.merge(c), InvalidArgument);
}

TEST_CASE("paired scheme shares the first copy and the response bits") {
  const auto data = gaussianData(200, 3, 2);
  const auto ranges = QuantizerRanges::fromBounds(2.5, 6.0);
  const auto ds = quantizeDataset(data.X, data.y, ranges, 5);
  const auto paired = quantizePaired(data.X, data.y, ranges, 5);
  CHECK(paired.firstBits == ds.xBits);
  CHECK(paired.yBits == ds.yBits);
  CHECK(paired.secondBits != ds.xBits);
  const auto first = estimateMomentsPaired(paired, PairedCross::FirstCopy);
  const auto squared = estimateMoments(ds);
  CHECK(first.sigmaXyHat == squared.sigmaXyHat);
  Eigen::MatrixXd offFirst = first.sigmaHat, offSquared = squared.sigmaHat;
  offFirst.diagonal().setZero();
  offSquared.diagonal().setZero();
  CHECK(offFirst == offSquared);
  const auto averaged = estimateMomentsPaired(paired, PairedCross::Averaged);
  CHECK(averaged.sigmaHat.diagonal() == first.sigmaHat.diagonal());
}

TEST_CASE("paired diagonal is unbiased for x^2 and noisier than the squared scheme") {
  // var(X~^2 | x) = R^2 x^2 - x^4 <= R^4 - x^4 = var(X~ X~~ | x)
  const double R = 1.0, x = 0.4;
  const std::size_t N = 40000;
  Eigen::MatrixXd X = Eigen::MatrixXd::Constant(N, 1, x);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(N);
  const auto paired = quantizePaired(X, y, QuantizerRanges::fromBounds(R, 1.0), 12);
  const auto m = estimateMomentsPaired(paired);
  const double se = std::sqrt((R * R * R * R - x * x * x * x) / N);
  CHECK(std::abs(m.sigmaHat(0, 0) - x * x) < 5 * se);
}
