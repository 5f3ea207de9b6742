#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <variant>

namespace bitreg {

/// Interval [lower, upper] whose endpoints are the only quantizer outputs.
class QuantizerRange {
 public:
  QuantizerRange(double lower, double upper);

  static QuantizerRange symmetric(double halfWidth) { return {-halfWidth, halfWidth}; }

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double width() const { return upper_ - lower_; }
  double value(bool upper) const { return upper ? upper_ : lower_; }

  bool operator==(const QuantizerRange&) const = default;

 private:
  double lower_;
  double upper_;
};

/// The three ranges used for a triplet: predictors [-R, R], squared
/// predictors [0, R^2], response [-L, L].
struct QuantizerRanges {
  QuantizerRange x;
  QuantizerRange xSq;
  QuantizerRange y;

  static QuantizerRanges fromBounds(double R, double L);

  double R() const { return x.upper(); }
  double L() const { return y.upper(); }

  bool operator==(const QuantizerRanges&) const = default;
};

enum class ClampMode {
  Clamp,   // out-of-range inputs are clamped and counted
  Strict,  // out-of-range inputs throw InvalidArgument
};

/// P(output = upper | z) = (z - lower) / (upper - lower). Requires z in range.
double upperProbability(double z, const QuantizerRange& range);

struct ScalarOutcome {
  bool upper;
  bool clamped;
};

/// One dithered 1-bit quantization of z given a uniform draw in [0, 1):
/// returns upper iff uniform < upperProbability(z).
ScalarOutcome quantizeScalar(double z, const QuantizerRange& range, double uniform,
                             ClampMode mode = ClampMode::Clamp);

// Range policies.

struct FixedRanges {
  double R;
  double L;
};

/// Ranges growing like sqrt(log n) for sub-Gaussian inputs:
///   R_n = sqrt(2 cK (q+1) log(n d))
///   L_n = (sqrt(2(q+1) cKbar) signalNorm + sigma sqrt(2(q+1) cKeps)) sqrt(log n)
/// signalNorm is ||Sigma^{1/2} beta*||_2.
struct SubGaussianLogN {
  double q = 3.0;
  double cK = 1.0;
  double cKbar = 1.0;
  double cKeps = 1.0;
  double sigma = 1.0;
  double signalNorm = 0.0;
};

using RangePolicy = std::variant<FixedRanges, SubGaussianLogN>;

/// Fixed ranges R (default 2.5) and L = 2.5 sqrt(sigma^2 + ||beta*||^2).
RangePolicy empiricalFixed(double sigma, double signalNorm, double R = 2.5);

QuantizerRanges resolveRanges(const RangePolicy& policy, std::size_t n, std::size_t d);

// Quantized data.

using BitVector = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>;
using BitMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// 2d+1 bits: xBits (1 = R, 0 = -R), xSqBits (1 = R^2, 0 = 0), yBit (1 = L, 0 = -L).
struct QuantizedSample {
  BitVector xBits;
  BitVector xSqBits;
  bool yBit = false;

  bool operator==(const QuantizedSample&) const = default;
};

struct QuantizedDataset {
  QuantizerRanges ranges = QuantizerRanges::fromBounds(1.0, 1.0);
  BitMatrix xBits;    // n x d
  BitMatrix xSqBits;  // n x d
  BitVector yBits;    // n
  std::uint64_t masterSeed = 0;
  std::size_t clampEvents = 0;  // bookkeeping only, not serialized

  std::size_t n() const { return static_cast<std::size_t>(yBits.size()); }
  std::size_t d() const { return static_cast<std::size_t>(xBits.cols()); }

  QuantizedSample sample(std::size_t i) const;

  /// +-1 matrix of predictor bits (n x d).
  Eigen::MatrixXd xSigns() const;
  /// +-1 vector of response bits.
  Eigen::VectorXd ySigns() const;

  /// Throws InvalidArgument on inconsistent shapes or ranges.
  void validate() const;

  /// Equality of the serialized content (ranges, bits, seed).
  bool sameContent(const QuantizedDataset& other) const;
};

/// Quantizes one (x, y) pair. Decisions for sample `index` are keyed by
/// (seed, index, coordinate, tag) so any subset of samples can be
/// regenerated independently. x^2 bits quantize the square of the raw input.
QuantizedSample quantizeTriplet(const Eigen::Ref<const Eigen::VectorXd>& x, double y,
                                const QuantizerRanges& ranges, std::uint64_t seed,
                                std::uint64_t index, ClampMode mode = ClampMode::Clamp,
                                std::size_t* clampEvents = nullptr);

QuantizedDataset quantizeDataset(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                 const Eigen::Ref<const Eigen::VectorXd>& y,
                                 const QuantizerRanges& ranges, std::uint64_t seed,
                                 ClampMode mode = ClampMode::Clamp);

}  // namespace bitreg
