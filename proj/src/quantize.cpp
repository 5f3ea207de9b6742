#include "bitreg/quantize.hpp"

#include <cmath>
#include <string>

#include "bitreg/error.hpp"
#include "bitreg/rng.hpp"

namespace bitreg {

QuantizerRange::QuantizerRange(double lower, double upper) : lower_(lower), upper_(upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
    throw InvalidArgument("quantizer range requires finite lower < upper");
  }
}

QuantizerRanges QuantizerRanges::fromBounds(double R, double L) {
  if (!(R > 0.0) || !(L > 0.0) || !std::isfinite(R * R) || !std::isfinite(L)) {
    throw InvalidArgument("range bounds R and L must be positive and finite");
  }
  return {QuantizerRange::symmetric(R), QuantizerRange(0.0, R * R), QuantizerRange::symmetric(L)};
}

double upperProbability(double z, const QuantizerRange& range) {
  return (z - range.lower()) / range.width();
}

ScalarOutcome quantizeScalar(double z, const QuantizerRange& range, double uniform,
                             ClampMode mode) {
  if (!std::isfinite(z)) throw InvalidArgument("cannot quantize a non-finite value");
  bool clamped = false;
  if (z < range.lower() || z > range.upper()) {
    if (mode == ClampMode::Strict) {
      throw InvalidArgument("value " + std::to_string(z) + " outside quantizer range [" +
                            std::to_string(range.lower()) + ", " +
                            std::to_string(range.upper()) + "]");
    }
    z = z < range.lower() ? range.lower() : range.upper();
    clamped = true;
  }
  return {uniform < upperProbability(z, range), clamped};
}

RangePolicy empiricalFixed(double sigma, double signalNorm, double R) {
  return FixedRanges{R, 2.5 * std::sqrt(sigma * sigma + signalNorm * signalNorm)};
}

QuantizerRanges resolveRanges(const RangePolicy& policy, std::size_t n, std::size_t d) {
  if (n < 2) throw InvalidArgument("range policy requires n >= 2");
  if (d < 1) throw InvalidArgument("range policy requires d >= 1");
  if (const auto* fixed = std::get_if<FixedRanges>(&policy)) {
    return QuantizerRanges::fromBounds(fixed->R, fixed->L);
  }
  const auto& sg = std::get<SubGaussianLogN>(policy);
  if (!(sg.q >= 0.0) || !(sg.cK > 0.0) || !(sg.cKbar > 0.0) || !(sg.cKeps > 0.0) ||
      !(sg.sigma >= 0.0) || !(sg.signalNorm >= 0.0)) {
    throw InvalidArgument("invalid sub-Gaussian range policy constants");
  }
  const double nd = static_cast<double>(n);
  if (sg.q > 0.0 && !(nd > std::pow(8.0, 1.0 / sg.q))) {
    throw InvalidArgument("sub-Gaussian range policy requires n > 8^(1/q)");
  }
  const double scale = 2.0 * (sg.q + 1.0);
  const double R = std::sqrt(scale * sg.cK * std::log(nd * static_cast<double>(d)));
  const double L = (std::sqrt(scale * sg.cKbar) * sg.signalNorm +
                    sg.sigma * std::sqrt(scale * sg.cKeps)) *
                   std::sqrt(std::log(nd));
  if (!(L > 0.0)) throw InvalidArgument("sub-Gaussian policy yields L = 0 (sigma and signal are 0)");
  return QuantizerRanges::fromBounds(R, L);
}

QuantizedSample QuantizedDataset::sample(std::size_t i) const {
  const auto row = static_cast<Eigen::Index>(i);
  return {xBits.row(row).transpose(), xSqBits.row(row).transpose(), yBits(row) != 0};
}

Eigen::MatrixXd QuantizedDataset::xSigns() const {
  return xBits.cast<double>().array() * 2.0 - 1.0;
}

Eigen::VectorXd QuantizedDataset::ySigns() const {
  return yBits.cast<double>().array() * 2.0 - 1.0;
}

void QuantizedDataset::validate() const {
  if (xBits.rows() != yBits.size() || xSqBits.rows() != yBits.size() ||
      xSqBits.cols() != xBits.cols()) {
    throw InvalidArgument("quantized dataset has inconsistent shapes");
  }
  if (ranges.x.lower() != -ranges.x.upper() || ranges.y.lower() != -ranges.y.upper()) {
    throw InvalidArgument("predictor and response ranges must be symmetric");
  }
  if (ranges.xSq.lower() != 0.0 || ranges.xSq.upper() != ranges.R() * ranges.R()) {
    throw InvalidArgument("squared-predictor range must be [0, R^2]");
  }
}

bool QuantizedDataset::sameContent(const QuantizedDataset& other) const {
  return ranges == other.ranges && masterSeed == other.masterSeed &&
         xBits.rows() == other.xBits.rows() && xBits.cols() == other.xBits.cols() &&
         xBits == other.xBits && xSqBits == other.xSqBits && yBits == other.yBits;
}

namespace {

// Quantizes one sample into caller-provided bit rows; returns clamp events.
template <typename XRow, typename BitRow>
std::size_t quantizeRow(const XRow& x, double y, const QuantizerRanges& ranges, std::uint64_t seed,
                        std::uint64_t index, ClampMode mode, BitRow&& xBits, BitRow&& xSqBits,
                        std::uint8_t& yBit) {
  std::size_t clamps = 0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const auto coord = static_cast<std::uint32_t>(j);
    const double xj = x(j);
    const auto q =
        quantizeScalar(xj, ranges.x, uniform01(seed, index, coord, StreamTag::QuantX), mode);
    const auto qsq = quantizeScalar(xj * xj, ranges.xSq,
                                    uniform01(seed, index, coord, StreamTag::QuantXSq), mode);
    xBits(j) = q.upper;
    xSqBits(j) = qsq.upper;
    clamps += q.clamped + qsq.clamped;
  }
  const auto qy = quantizeScalar(y, ranges.y, uniform01(seed, index, 0, StreamTag::QuantY), mode);
  yBit = qy.upper;
  return clamps + qy.clamped;
}

}  // namespace

QuantizedSample quantizeTriplet(const Eigen::Ref<const Eigen::VectorXd>& x, double y,
                                const QuantizerRanges& ranges, std::uint64_t seed,
                                std::uint64_t index, ClampMode mode, std::size_t* clampEvents) {
  QuantizedSample out{BitVector(x.size()), BitVector(x.size()), false};
  std::uint8_t yBit = 0;
  const std::size_t clamps =
      quantizeRow(x, y, ranges, seed, index, mode, out.xBits, out.xSqBits, yBit);
  out.yBit = yBit != 0;
  if (clampEvents) *clampEvents += clamps;
  return out;
}

QuantizedDataset quantizeDataset(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                 const Eigen::Ref<const Eigen::VectorXd>& y,
                                 const QuantizerRanges& ranges, std::uint64_t seed,
                                 ClampMode mode) {
  if (X.rows() != y.size()) throw InvalidArgument("X and y have different numbers of rows");
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  QuantizedDataset ds;
  ds.ranges = ranges;
  ds.masterSeed = seed;
  ds.xBits.resize(n, d);
  ds.xSqBits.resize(n, d);
  ds.yBits.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ds.clampEvents += quantizeRow(X.row(i), y(i), ranges, seed, static_cast<std::uint64_t>(i),
                                  mode, ds.xBits.row(i), ds.xSqBits.row(i), ds.yBits(i));
  }
  return ds;
}

}  // namespace bitreg
