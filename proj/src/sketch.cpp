#include "bitreg/sketch.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

#include "bitreg/error.hpp"
#include "bitreg/rng.hpp"

namespace bitreg {
namespace {

// Keeps a materialized block of S under ~32 MB.
constexpr std::size_t kBlockEntries = std::size_t{1} << 22;

void checkConfig(const SketchConfig& cfg, Eigen::Index n) {
  if (cfg.m == 0) throw InvalidArgument("sketch size m must be >= 1");
  if (static_cast<Eigen::Index>(cfg.m) > n) throw InvalidArgument("sketch size m exceeds n");
  if (cfg.kind == SketchKind::Identity && static_cast<Eigen::Index>(cfg.m) != n) {
    throw InvalidArgument("identity sketch requires m = n");
  }
  if (cfg.method == SketchMethod::GaussianGram && cfg.kind != SketchKind::GaussianIID) {
    throw InvalidArgument("GaussianGram method supports only the Gaussian sketch kind");
  }
}

SketchedData sketchStreamed(const Eigen::Ref<const Eigen::MatrixXd>& X,
                            const Eigen::Ref<const Eigen::VectorXd>& y, const SketchConfig& cfg,
                            double scale) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  const auto m = static_cast<Eigen::Index>(cfg.m);
  SketchedData out{Eigen::MatrixXd(m, d), Eigen::VectorXd(m)};
  if (cfg.kind == SketchKind::Identity) {
    out.X = X;
    out.y = y;
    return out;
  }
  Eigen::MatrixXd Z(n, d + 1);
  Z << X, y;
  const auto blockRows = static_cast<Eigen::Index>(
      std::max<std::size_t>(1, kBlockEntries / static_cast<std::size_t>(n)));
  Eigen::MatrixXd block;
  for (Eigen::Index r0 = 0; r0 < m; r0 += blockRows) {
    const Eigen::Index rows = std::min(blockRows, m - r0);
    block.resize(rows, n);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index k = 0; k < n; ++k) {
        block(r, k) = sketchEntry(cfg, static_cast<std::size_t>(r0 + r), static_cast<std::size_t>(k));
      }
    }
    const Eigen::MatrixXd part = scale * (block * Z);
    out.X.middleRows(r0, rows) = part.leftCols(d);
    out.y.segment(r0, rows) = part.col(d);
  }
  return out;
}

SketchedData sketchGram(const Eigen::Ref<const Eigen::MatrixXd>& X,
                        const Eigen::Ref<const Eigen::VectorXd>& y, const SketchConfig& cfg) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  const auto m = static_cast<Eigen::Index>(cfg.m);
  Eigen::MatrixXd Z(n, d + 1);
  Z << X, y;
  // Z^T Z = U^T U with U upper triangular (d+1) x (d+1); n >= m >= 1 but n may
  // be below d + 1, so pad U to a square.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
  const Eigen::Index k = std::min(n, d + 1);
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(d + 1, d + 1);
  U.topRows(k) = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  // Row i of S Z ~ N(0, Z^T Z / m); after the (n/m)^{-1/2} factor, N(0, Z^T Z / n).
  Eigen::MatrixXd G(m, d + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= d; ++j) {
      G(i, j) = standardNormal(cfg.seed, static_cast<std::uint64_t>(i), static_cast<std::uint32_t>(j),
                               StreamTag::SketchGram);
    }
  }
  const Eigen::MatrixXd part = (G * U) / std::sqrt(static_cast<double>(n));
  return {part.leftCols(d), part.col(d)};
}

}  // namespace

double sketchEntry(const SketchConfig& cfg, std::size_t row, std::size_t col) {
  const double m = static_cast<double>(cfg.m);
  switch (cfg.kind) {
    case SketchKind::GaussianIID:
      return standardNormal(cfg.seed, row, static_cast<std::uint32_t>(col), StreamTag::Sketch) /
             std::sqrt(m);
    case SketchKind::TernaryAchlioptas: {
      const double u = uniform01(cfg.seed, row, static_cast<std::uint32_t>(col), StreamTag::Sketch);
      const double mag = std::sqrt(3.0 / m);
      if (u < 1.0 / 6.0) return -mag;
      if (u >= 5.0 / 6.0) return mag;
      return 0.0;
    }
    case SketchKind::Identity:
      return row == col ? 1.0 : 0.0;
  }
  throw InvalidArgument("unknown sketch kind");
}

SketchedData sketchData(const Eigen::Ref<const Eigen::MatrixXd>& X,
                        const Eigen::Ref<const Eigen::VectorXd>& y, const SketchConfig& cfg) {
  if (X.rows() != y.size()) throw InvalidArgument("X and y have different numbers of rows");
  if (X.cols() == 0) throw InvalidArgument("X must have at least one column");
  checkConfig(cfg, X.rows());
  if (X.cols() >= std::numeric_limits<std::uint32_t>::max() ||
      X.rows() >= std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("sketch dimensions exceed the generator's coordinate range");
  }
  if (cfg.method == SketchMethod::GaussianGram) return sketchGram(X, y, cfg);
  const double scale = std::sqrt(static_cast<double>(cfg.m) / static_cast<double>(X.rows()));
  return sketchStreamed(X, y, cfg, scale);
}

QuantizedDataset sketchThenQuantize(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                    const Eigen::Ref<const Eigen::VectorXd>& y,
                                    const SketchConfig& cfg, const RangePolicy& policy,
                                    ClampMode mode) {
  const SketchedData sk = sketchData(X, y, cfg);
  const QuantizerRanges ranges =
      resolveRanges(policy, cfg.m, static_cast<std::size_t>(X.cols()));
  return quantizeDataset(sk.X, sk.y, ranges, cfg.seed, mode);
}

}  // namespace bitreg
