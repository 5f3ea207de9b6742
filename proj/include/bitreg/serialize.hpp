#pragma once

#include <vector>

#include "json.hpp"

#include "bitreg/moments.hpp"
#include "bitreg/quantize.hpp"
#include "bitreg/regress.hpp"
#include "bitreg/sparse.hpp"

namespace bitreg {

// JSON views of library results. Matrices are nested arrays in row-major order.

nlohmann::ordered_json toJson(const QuantizerRanges& ranges);
nlohmann::ordered_json toJson(const MomentEstimates& moments);
/// Fields: beta, se, ci, level, n, d, minEig.
nlohmann::ordered_json toJson(const FitResult& fit);
/// FitResult fields plus support and, when debiased, infNormResidual and mu.
nlohmann::ordered_json toJson(const LassoResult& lasso, const MomentEstimates& moments);
nlohmann::ordered_json toJson(const LassoResult& lasso, const DebiasResult& db,
                              const MomentEstimates& moments, double mu);

/// Inverse of toJson(MomentEstimates). Throws DataError on malformed input.
MomentEstimates momentsFromJson(const nlohmann::json& j);

}  // namespace bitreg
