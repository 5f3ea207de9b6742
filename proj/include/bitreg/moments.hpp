#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>

#include "bitreg/quantize.hpp"

namespace bitreg {

/// Plug-in second-moment estimates from quantized triplets:
///   sigmaHat   = (1/n) sum_i [ Xt_i Xt_i^T + diag(Xt2_ij - R^2) ]
///   sigmaXyHat = (1/n) sum_i Xt_i Yt_i
/// The diagonal of Xt Xt^T is identically R^2, so sigmaHat_jj is just the mean
/// of the quantized squares.
struct MomentEstimates {
  Eigen::MatrixXd sigmaHat;
  Eigen::VectorXd sigmaXyHat;
  std::size_t n = 0;
  QuantizerRanges ranges = QuantizerRanges::fromBounds(1.0, 1.0);

  std::size_t d() const { return static_cast<std::size_t>(sigmaXyHat.size()); }
};

/// Streaming accumulator. Every quantized product is an integer multiple of
/// R^2 (or R L), so the sums are kept as exact integer counts; accumulation
/// order and merging therefore cannot change the result in any bit.
class MomentAccumulator {
 public:
  MomentAccumulator(std::size_t d, const QuantizerRanges& ranges);

  void add(const QuantizedSample& sample);
  /// Throws InvalidArgument if d or ranges differ.
  void merge(const MomentAccumulator& other);
  /// Throws InvalidArgument when no samples were added.
  MomentEstimates finalize() const;

  std::size_t count() const { return n_; }
  std::size_t d() const { return static_cast<std::size_t>(cross_.size()); }
  const QuantizerRanges& ranges() const { return ranges_; }

 private:
  using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
  using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

  QuantizerRanges ranges_;
  CountMatrix products_;  // upper triangle: sum s_j s_k; diagonal: count of x^2 upper bits
  CountVector cross_;     // sum s_j t
  std::size_t n_ = 0;
};

MomentAccumulator& accumulateMoments(MomentAccumulator& acc, const QuantizedSample& sample);

/// Batch estimate; bitwise identical to streaming all samples through a
/// MomentAccumulator. Throws InvalidArgument on an empty dataset.
MomentEstimates estimateMoments(const QuantizedDataset& ds);

// Paired scheme: each predictor quantized twice independently, the product of
// the two copies estimating X^2.

struct PairedQuantizedDataset {
  QuantizerRanges ranges = QuantizerRanges::fromBounds(1.0, 1.0);
  BitMatrix firstBits;   // n x d
  BitMatrix secondBits;  // n x d, independent dither stream
  BitVector yBits;
  std::uint64_t masterSeed = 0;
  std::size_t clampEvents = 0;  // includes the x^2 bits drawn alongside the first copy

  std::size_t n() const { return static_cast<std::size_t>(yBits.size()); }
  std::size_t d() const { return static_cast<std::size_t>(firstBits.cols()); }
};

/// firstBits and yBits coincide with quantizeDataset(X, y, ranges, seed).
/// The second copy uses stream (seed, i, j, QuantXSecond).
PairedQuantizedDataset quantizePaired(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                      const Eigen::Ref<const Eigen::VectorXd>& y,
                                      const QuantizerRanges& ranges, std::uint64_t seed,
                                      ClampMode mode = ClampMode::Clamp);

/// Adds an independent second copy of the predictor bits to an existing
/// dataset quantized from X (same seed convention as quantizePaired).
PairedQuantizedDataset pairWithSecondCopy(const QuantizedDataset& ds,
                                          const Eigen::Ref<const Eigen::MatrixXd>& X,
                                          ClampMode mode = ClampMode::Clamp);

/// How the paired scheme forms off-diagonals and the cross moment.
enum class PairedCross {
  FirstCopy,  // first bit set only
  Averaged,   // mean of the estimates from both copies
};

/// Diagonal: (1/n) sum_i Xt_ij Xtt_ij. Throws InvalidArgument on an empty dataset.
MomentEstimates estimateMomentsPaired(const PairedQuantizedDataset& ds,
                                      PairedCross cross = PairedCross::FirstCopy);

}  // namespace bitreg
