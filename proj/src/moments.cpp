#include "bitreg/moments.hpp"

#include "bitreg/error.hpp"
#include "bitreg/rng.hpp"

namespace bitreg {
namespace {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// Counts are scaled by 1/n once here. The scale factors are 1 or 0.5 (the
// averaged paired estimator sums two copies), both exact.
MomentEstimates finalizeCounts(const CountMatrix& products, const CountVector& cross,
                               std::size_t n, const QuantizerRanges& ranges,
                               double offDiagScale = 1.0, double crossScale = 1.0) {
  if (n == 0) throw InvalidArgument("cannot estimate moments from zero samples");
  const double R = ranges.R();
  const double nd = static_cast<double>(n);
  const Eigen::Index d = cross.size();
  MomentEstimates out;
  out.n = n;
  out.ranges = ranges;
  out.sigmaHat.resize(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    out.sigmaHat(k, k) = R * R * (static_cast<double>(products(k, k)) / nd);
    for (Eigen::Index j = 0; j < k; ++j) {
      const double v = R * R * (offDiagScale * static_cast<double>(products(j, k)) / nd);
      out.sigmaHat(j, k) = v;
      out.sigmaHat(k, j) = v;
    }
  }
  out.sigmaXyHat =
      (R * ranges.L()) * (crossScale * cross.cast<double>().array() / nd).matrix();
  return out;
}

Eigen::MatrixXd signs(const BitMatrix& bits) { return bits.cast<double>().array() * 2.0 - 1.0; }

// Upper-triangular S^T S as exact integer counts (entries are sums of +-1,
// exact in double below 2^53).
CountMatrix signProducts(const Eigen::MatrixXd& S) {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(S.cols(), S.cols());
  G.selfadjointView<Eigen::Upper>().rankUpdate(S.transpose());
  return G.triangularView<Eigen::Upper>().toDenseMatrix().cast<std::int64_t>();
}

}  // namespace

MomentAccumulator::MomentAccumulator(std::size_t d, const QuantizerRanges& ranges)
    : ranges_(ranges),
      products_(CountMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))),
      cross_(CountVector::Zero(static_cast<Eigen::Index>(d))) {
  if (d == 0) throw InvalidArgument("moment accumulator requires d >= 1");
}

void MomentAccumulator::add(const QuantizedSample& sample) {
  const Eigen::Index d = cross_.size();
  if (sample.xBits.size() != d || sample.xSqBits.size() != d) {
    throw InvalidArgument("sample dimension does not match accumulator");
  }
  const std::int64_t t = sample.yBit ? 1 : -1;
  for (Eigen::Index k = 0; k < d; ++k) {
    const std::int64_t sk = sample.xBits(k) ? 1 : -1;
    for (Eigen::Index j = 0; j < k; ++j) products_(j, k) += (sample.xBits(j) ? 1 : -1) * sk;
    products_(k, k) += sample.xSqBits(k) ? 1 : 0;
    cross_(k) += sk * t;
  }
  ++n_;
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.cross_.size() != cross_.size() || !(other.ranges_ == ranges_)) {
    throw InvalidArgument("cannot merge accumulators with different d or ranges");
  }
  products_ += other.products_;
  cross_ += other.cross_;
  n_ += other.n_;
}

MomentEstimates MomentAccumulator::finalize() const {
  return finalizeCounts(products_, cross_, n_, ranges_);
}

MomentAccumulator& accumulateMoments(MomentAccumulator& acc, const QuantizedSample& sample) {
  acc.add(sample);
  return acc;
}

MomentEstimates estimateMoments(const QuantizedDataset& ds) {
  ds.validate();
  if (ds.n() == 0) throw InvalidArgument("cannot estimate moments from an empty dataset");
  const Eigen::MatrixXd S = signs(ds.xBits);
  CountMatrix products = signProducts(S);
  products.diagonal() = ds.xSqBits.cast<std::int64_t>().colwise().sum().transpose();
  const CountVector cross = (S.transpose() * ds.ySigns()).cast<std::int64_t>();
  return finalizeCounts(products, cross, ds.n(), ds.ranges);
}

PairedQuantizedDataset pairWithSecondCopy(const QuantizedDataset& ds,
                                          const Eigen::Ref<const Eigen::MatrixXd>& X,
                                          ClampMode mode) {
  ds.validate();
  if (X.rows() != static_cast<Eigen::Index>(ds.n()) || X.cols() != static_cast<Eigen::Index>(ds.d())) {
    throw InvalidArgument("X does not match the quantized dataset");
  }
  PairedQuantizedDataset out;
  out.ranges = ds.ranges;
  out.masterSeed = ds.masterSeed;
  out.firstBits = ds.xBits;
  out.yBits = ds.yBits;
  out.secondBits.resize(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      const double u = uniform01(ds.masterSeed, static_cast<std::uint64_t>(i),
                                 static_cast<std::uint32_t>(j), StreamTag::QuantXSecond);
      const auto second = quantizeScalar(X(i, j), ds.ranges.x, u, mode);
      out.secondBits(i, j) = second.upper;
      out.clampEvents += second.clamped;
    }
  }
  return out;
}

PairedQuantizedDataset quantizePaired(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                      const Eigen::Ref<const Eigen::VectorXd>& y,
                                      const QuantizerRanges& ranges, std::uint64_t seed,
                                      ClampMode mode) {
  const QuantizedDataset ds = quantizeDataset(X, y, ranges, seed, mode);
  PairedQuantizedDataset out = pairWithSecondCopy(ds, X, mode);
  out.clampEvents += ds.clampEvents;
  return out;
}

MomentEstimates estimateMomentsPaired(const PairedQuantizedDataset& ds, PairedCross cross) {
  if (ds.n() == 0) throw InvalidArgument("cannot estimate moments from an empty dataset");
  if (ds.firstBits.rows() != ds.yBits.size() || ds.secondBits.rows() != ds.yBits.size() ||
      ds.secondBits.cols() != ds.firstBits.cols()) {
    throw InvalidArgument("paired dataset has inconsistent shapes");
  }
  const Eigen::MatrixXd S1 = signs(ds.firstBits);
  const Eigen::MatrixXd S2 = signs(ds.secondBits);
  const Eigen::VectorXd t = ds.yBits.cast<double>().array() * 2.0 - 1.0;

  CountMatrix products = signProducts(S1);
  CountVector crossCounts = (S1.transpose() * t).cast<std::int64_t>();
  double offDiagScale = 1.0;
  double crossScale = 1.0;
  if (cross == PairedCross::Averaged) {
    products += signProducts(S2);
    crossCounts += (S2.transpose() * t).cast<std::int64_t>();
    offDiagScale = 0.5;
    crossScale = 0.5;
  }
  // Diagonal count is sum_i s1_ij s2_ij; finalize scales it by R^2 / n.
  products.diagonal() = (S1.array() * S2.array()).colwise().sum().transpose().cast<std::int64_t>();
  return finalizeCounts(products, crossCounts, ds.n(), ds.ranges, offDiagScale, crossScale);
}

}  // namespace bitreg
