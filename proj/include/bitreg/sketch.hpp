#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>

#include "bitreg/quantize.hpp"

namespace bitreg {

enum class SketchKind {
  GaussianIID,        // S_ij ~ N(0, 1/m)
  TernaryAchlioptas,  // sqrt(3/m) * {-1, 0, 1} with probabilities 1/6, 2/3, 1/6
  Identity,           // S = I (requires m = n); for pipeline tests
};

enum class SketchMethod {
  // Materialize S in row blocks from the seeded generator and multiply.
  // Cost O(m n (d + 1)).
  Streamed,
  // Gaussian kind only: the rows of S [X y] are iid N(0, [X y]^T [X y] / m),
  // so they are drawn directly from a QR factor of [X y]. Same distribution
  // as Streamed, different realization; cost O(n d^2 + m d^2).
  GaussianGram,
};

struct SketchConfig {
  std::size_t m = 1;
  SketchKind kind = SketchKind::GaussianIID;
  std::uint64_t seed = 0;
  SketchMethod method = SketchMethod::Streamed;
};

/// Entry S(row, col) of the sketching matrix for the Streamed method, keyed by
/// (seed, row, col). Includes the 1/sqrt(m) (or sqrt(3/m)) normalization.
double sketchEntry(const SketchConfig& cfg, std::size_t row, std::size_t col);

struct SketchedData {
  Eigen::MatrixXd X;  // m x d
  Eigen::VectorXd y;  // m
};

/// Xhat = (n/m)^{-1/2} S X and yhat = (n/m)^{-1/2} S y. Throws InvalidArgument
/// when m is 0 or exceeds n, or the kind/method combination is unsupported.
SketchedData sketchData(const Eigen::Ref<const Eigen::MatrixXd>& X,
                        const Eigen::Ref<const Eigen::VectorXd>& y, const SketchConfig& cfg);

/// Sketches, resolves ranges for (m, d) from `policy`, then quantizes the m
/// sketched rows with quantization seed cfg.seed (the sketch uses its own
/// stream tag, so the two are independent).
QuantizedDataset sketchThenQuantize(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                    const Eigen::Ref<const Eigen::VectorXd>& y,
                                    const SketchConfig& cfg, const RangePolicy& policy,
                                    ClampMode mode = ClampMode::Clamp);

}  // namespace bitreg
