#include "bitreg/serialize.hpp"

#include <cmath>

#include "bitreg/error.hpp"

namespace bitreg {

using nlohmann::ordered_json;

namespace {

ordered_json vectorJson(const Eigen::VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

ordered_json matrixJson(const Eigen::MatrixXd& A) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

ordered_json intervalsJson(const std::vector<ConfidenceInterval>& ci) {
  ordered_json out = ordered_json::array();
  for (const auto& c : ci) out.push_back({c.lower, c.upper});
  return out;
}

}  // namespace

ordered_json toJson(const QuantizerRanges& ranges) { return {{"R", ranges.R()}, {"L", ranges.L()}}; }

ordered_json toJson(const MomentEstimates& m) {
  ordered_json out;
  out["n"] = m.n;
  out["d"] = m.d();
  out["ranges"] = toJson(m.ranges);
  out["sigmaHat"] = matrixJson(m.sigmaHat);
  out["sigmaXyHat"] = vectorJson(m.sigmaXyHat);
  return out;
}

ordered_json toJson(const FitResult& fit) {
  ordered_json out;
  out["beta"] = vectorJson(fit.betaHat);
  out["se"] = vectorJson(fit.stdErrors);
  out["ci"] = intervalsJson(fit.ci);
  out["level"] = fit.level;
  out["n"] = fit.n;
  out["d"] = fit.d();
  out["minEig"] = fit.minEigSigmaHat;
  return out;
}

ordered_json toJson(const LassoResult& lasso, const MomentEstimates& moments) {
  ordered_json out;
  out["beta"] = vectorJson(lasso.beta);
  out["n"] = moments.n;
  out["d"] = moments.d();
  out["support"] = lasso.support();
  out["converged"] = lasso.converged;
  out["iterations"] = lasso.iterations;
  out["objective"] = lasso.objective;
  return out;
}

ordered_json toJson(const LassoResult& lasso, const DebiasResult& db, const MomentEstimates& moments, double mu) {
  ordered_json out;
  out["beta"] = vectorJson(db.betaDb);
  out["se"] = vectorJson(db.stdErrors);
  out["ci"] = intervalsJson(db.ci);
  out["level"] = db.level;
  out["n"] = moments.n;
  out["d"] = moments.d();
  out["betaLasso"] = vectorJson(lasso.beta);
  out["support"] = lasso.support();
  out["infNormResidual"] = db.infNormResidual;
  out["mu"] = mu;
  return out;
}

MomentEstimates momentsFromJson(const nlohmann::json& j) {
  try {
    const std::size_t n = j.at("n").get<std::size_t>();
    const std::size_t d = j.at("d").get<std::size_t>();
    const auto& r = j.at("ranges");
    MomentEstimates m;
    m.n = n;
    m.ranges = QuantizerRanges::fromBounds(r.at("R").get<double>(), r.at("L").get<double>());
    const auto& S = j.at("sigmaHat");
    const auto& c = j.at("sigmaXyHat");
    if (S.size() != d || c.size() != d) throw DataError("moments JSON: dimensions do not match d");
    m.sigmaHat.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    m.sigmaXyHat.resize(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      if (S[i].size() != d) throw DataError("moments JSON: sigmaHat row length does not match d");
      for (std::size_t k = 0; k < d; ++k) {
        m.sigmaHat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = S[i][k].get<double>();
      }
      m.sigmaXyHat(static_cast<Eigen::Index>(i)) = c[i].get<double>();
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("moments JSON: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("moments JSON: ") + e.what());
  }
}

}  // namespace bitreg
