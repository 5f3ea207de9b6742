#include "doctest.h"

#include <cmath>

#include "bitreg/error.hpp"
#include "bitreg/rng.hpp"
#include "bitreg/sketch.hpp"

using namespace bitreg;

namespace {

Eigen::MatrixXd testMatrix(Eigen::Index n, Eigen::Index d) {
  Eigen::MatrixXd X(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = standardNormal(21, i, j, StreamTag::Test);
  }
  return X;
}

}  // namespace

TEST_CASE("identity sketch is a pass-through") {
  const auto X = testMatrix(30, 2);
  const Eigen::VectorXd y = X.col(0);
  const auto sk = sketchData(X, y, {30, SketchKind::Identity, 1});
  CHECK(sk.X == X);
  CHECK(sk.y == y);
}

TEST_CASE("ternary entries take three values with the stated frequencies") {
  const SketchConfig cfg{12, SketchKind::TernaryAchlioptas, 5};
  const double mag = std::sqrt(3.0 / 12.0);
  int zero = 0, pos = 0, neg = 0;
  const int N = 60000;
  for (int k = 0; k < N; ++k) {
    const double s = sketchEntry(cfg, k % 12, k / 12);
    if (s == 0.0) ++zero;
    else if (s == mag) ++pos;
    else if (s == -mag) ++neg;
  }
  CHECK(zero + pos + neg == N);
  CHECK(zero / double(N) == doctest::Approx(2.0 / 3.0).epsilon(0.02));
  CHECK(pos / double(N) == doctest::Approx(1.0 / 6.0).epsilon(0.05));
}

TEST_CASE("sketched columns are isotropic on average") {
  // E[(n/m) ||Xhat_col||^2] = ||X_col||^2 for every kind and method.
  const Eigen::Index n = 120, m = 30;
  const auto X = testMatrix(n, 2);
  const Eigen::VectorXd y = X.col(0) - X.col(1);
  const double target = X.col(0).squaredNorm();
  struct Case {
    SketchKind kind;
    SketchMethod method;
  };
  for (const Case c : {Case{SketchKind::GaussianIID, SketchMethod::Streamed},
                       Case{SketchKind::TernaryAchlioptas, SketchMethod::Streamed},
                       Case{SketchKind::GaussianIID, SketchMethod::GaussianGram}}) {
    const int reps = 400;
    double acc = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto sk = sketchData(X, y, {static_cast<std::size_t>(m), c.kind, static_cast<std::uint64_t>(r), c.method});
      acc += double(n) / m * sk.X.col(0).squaredNorm();
    }
    // Relative sd of one draw is about sqrt(2 / m).
    CHECK(std::abs(acc / reps / target - 1.0) < 5 * std::sqrt(2.0 / m / reps));
  }
}

TEST_CASE("sketching is deterministic and validates its configuration") {
  const auto X = testMatrix(50, 3);
  const Eigen::VectorXd y = X.rowwise().sum();
  const auto a = sketchData(X, y, {10, SketchKind::GaussianIID, 9});
  const auto b = sketchData(X, y, {10, SketchKind::GaussianIID, 9});
  CHECK(a.X == b.X);
  CHECK(a.X.rows() == 10);
  CHECK_THROWS_AS(sketchData(X, y, {0, SketchKind::GaussianIID, 1}), InvalidArgument);
  CHECK_THROWS_AS(sketchData(X, y, {51, SketchKind::GaussianIID, 1}), InvalidArgument);
  CHECK_THROWS_AS(sketchData(X, y, {10, SketchKind::Identity, 1}), InvalidArgument);
  CHECK_THROWS_AS(sketchData(X, y, {10, SketchKind::TernaryAchlioptas, 1, SketchMethod::GaussianGram}),
                  InvalidArgument);
  const auto ds = sketchThenQuantize(X, y, {10, SketchKind::GaussianIID, 9}, FixedRanges{3.0, 8.0});
  CHECK(ds.n() == 10);
  CHECK(ds.d() == 3);
}
