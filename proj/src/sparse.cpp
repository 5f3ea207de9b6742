#include "bitreg/sparse.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>

#include "bitreg/error.hpp"

namespace bitreg {

void LassoConfig::validate() const {
  if (!std::isfinite(lambda) || lambda < 0.0) throw InvalidArgument("lambda must be finite and >= 0");
  if (!(ballRadius > 0.0)) throw InvalidArgument("ballRadius must be > 0 (or infinite)");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be > 0");
  if (maxIter == 0) throw InvalidArgument("maxIter must be >= 1");
  if (const auto* fixed = std::get_if<FixedStep>(&stepRule)) {
    if (!(fixed->eta > 0.0) || !std::isfinite(fixed->eta)) throw InvalidArgument("invalid step size");
  } else {
    const auto& bt = std::get<Backtracking>(stepRule);
    if (!(bt.initial >= 0.0) || !std::isfinite(bt.initial)) throw InvalidArgument("invalid step size");
    if (!(bt.shrink > 0.0 && bt.shrink < 1.0)) throw InvalidArgument("backtracking shrink must be in (0, 1)");
  }
}

std::vector<std::size_t> LassoResult::support() const {
  std::vector<std::size_t> out;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0) out.push_back(static_cast<std::size_t>(j));
  }
  return out;
}

Eigen::VectorXd softThreshold(const Eigen::Ref<const Eigen::VectorXd>& z, double t) {
  return z.unaryExpr([t](double v) { return softThreshold(v, t); });
}

Eigen::VectorXd projectL1Ball(const Eigen::Ref<const Eigen::VectorXd>& v, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("l1-ball radius must be > 0");
  if (!std::isfinite(radius) || v.lpNorm<1>() <= radius) return v;
  // Simplex projection of |v|: find theta with sum max(|v_j| - theta, 0) = radius.
  std::vector<double> u(static_cast<std::size_t>(v.size()));
  for (Eigen::Index j = 0; j < v.size(); ++j) u[static_cast<std::size_t>(j)] = std::abs(v(j));
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (u[k] > candidate) theta = candidate;
  }
  return softThreshold(v, theta);
}

double lassoObjective(const MomentEstimates& moments, const Eigen::Ref<const Eigen::VectorXd>& beta,
                      double lambda) {
  return 0.5 * beta.dot(moments.sigmaHat * beta) - beta.dot(moments.sigmaXyHat) +
         lambda * beta.lpNorm<1>();
}

namespace {

double operatorNorm(const Eigen::MatrixXd& A) {
  if (A.rows() == 1) return std::abs(A(0, 0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

LassoResult fitLasso(const MomentEstimates& moments, const LassoConfig& cfg,
                     const Eigen::Ref<const Eigen::VectorXd>& start) {
  cfg.validate();
  const Eigen::MatrixXd& S = moments.sigmaHat;
  const Eigen::VectorXd& b = moments.sigmaXyHat;
  if (start.size() != b.size() || S.rows() != b.size()) throw InvalidArgument("dimension mismatch");

  const bool backtrack = std::holds_alternative<Backtracking>(cfg.stepRule);
  double eta;
  double shrink = 0.5;
  if (backtrack) {
    const auto& bt = std::get<Backtracking>(cfg.stepRule);
    const double opNorm = operatorNorm(S);
    eta = bt.initial > 0.0 ? bt.initial : (opNorm > 0.0 ? 1.0 / opNorm : 1.0);
    shrink = bt.shrink;
  } else {
    eta = std::get<FixedStep>(cfg.stepRule).eta;
  }

  auto smooth = [&](const Eigen::VectorXd& beta, const Eigen::VectorXd& Sbeta) {
    return 0.5 * beta.dot(Sbeta) - beta.dot(b);
  };
  auto step = [&](const Eigen::VectorXd& beta, const Eigen::VectorXd& grad, double h) {
    return projectL1Ball(softThreshold(beta - h * grad, h * cfg.lambda), cfg.ballRadius);
  };

  LassoResult result;
  Eigen::VectorXd beta = projectL1Ball(start, cfg.ballRadius);
  Eigen::VectorXd Sbeta = S * beta;
  double f = smooth(beta, Sbeta);
  for (std::size_t it = 0; it < cfg.maxIter; ++it) {
    const Eigen::VectorXd grad = Sbeta - b;
    Eigen::VectorXd next = step(beta, grad, eta);
    Eigen::VectorXd Snext = S * next;
    double fNext = smooth(next, Snext);
    if (backtrack) {
      // Quadratic upper bound around beta; the prox step minimizes it, so
      // acceptance implies the full objective does not increase.
      for (int tries = 0; tries < 200; ++tries) {
        const Eigen::VectorXd diff = next - beta;
        if (fNext <= f + grad.dot(diff) + diff.squaredNorm() / (2.0 * eta) + 1e-15 * std::abs(f)) break;
        eta *= shrink;
        next = step(beta, grad, eta);
        Snext = S * next;
        fNext = smooth(next, Snext);
      }
    }
    const double residual = (beta - next).lpNorm<Eigen::Infinity>();
    result.iterations = it + 1;
    if (residual <= cfg.tol) {
      result.beta = beta;
      result.converged = true;
      result.fixedPointResidual = residual;
      result.objective = lassoObjective(moments, beta, cfg.lambda);
      result.step = eta;
      return result;
    }
    if (!next.allFinite() || !std::isfinite(fNext)) {
      throw NonConvergence("lasso iterates diverged; the objective may be unbounded below");
    }
    beta = std::move(next);
    Sbeta = std::move(Snext);
    f = fNext;
    result.fixedPointResidual = residual;
  }
  // Budget exhausted: report the last (and, under backtracking, best) iterate.
  result.beta = beta;
  result.converged = false;
  result.fixedPointResidual = (beta - step(beta, Sbeta - b, eta)).lpNorm<Eigen::Infinity>();
  result.objective = lassoObjective(moments, beta, cfg.lambda);
  result.step = eta;
  return result;
}

LassoResult fitLasso(const MomentEstimates& moments, const LassoConfig& cfg) {
  return fitLasso(moments, cfg, Eigen::VectorXd::Zero(moments.sigmaXyHat.size()));
}

DebiasMatrix computeDebiasMatrix(const MomentEstimates& moments, double mu, const DebiasOptions& opt) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("mu must be finite and > 0");
  if (!(opt.slackFactor > 0.0 && opt.slackFactor <= 1.0)) throw InvalidArgument("slackFactor must be in (0, 1]");
  const Eigen::MatrixXd& S = moments.sigmaHat;
  const Eigen::Index d = S.rows();
  if (d == 0 || S.cols() != d) throw InvalidArgument("sigmaHat must be square and nonempty");
  if (!(S.diagonal().minCoeff() > 0.0)) throw Infeasible(0, 1.0);
  const double penalty = opt.slackFactor * mu;

  DebiasMatrix out;
  out.mu = mu;
  out.M.resize(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(d);
    m(j) = 1.0 / S(j, j);
    Eigen::VectorXd Sm = S.col(j) * m(j);
    double bestResidual = std::numeric_limits<double>::infinity();
    bool done = false;
    for (std::size_t sweep = 0; sweep < opt.maxSweeps && !done; ++sweep) {
      double maxChange = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        // Minimize over m_k with the others fixed.
        const double target = (k == j ? 1.0 : 0.0) - (Sm(k) - S(k, k) * m(k));
        const double updated = softThreshold(target, penalty) / S(k, k);
        const double delta = updated - m(k);
        if (delta != 0.0) {
          Sm += S.col(k) * delta;
          m(k) = updated;
          maxChange = std::max(maxChange, std::abs(delta) * S(k, k));
        }
      }
      Eigen::VectorXd gap = Sm;
      gap(j) -= 1.0;
      const double residual = gap.lpNorm<Eigen::Infinity>();
      bestResidual = std::min(bestResidual, residual);
      if (!m.allFinite()) break;
      done = maxChange <= 1e-12 * std::max(1.0, mu);
      if (done && residual > mu) throw Infeasible(static_cast<std::size_t>(j), residual);
    }
    if (!done) throw Infeasible(static_cast<std::size_t>(j), bestResidual);
    // Recompute the gap exactly instead of trusting the running update.
    Eigen::VectorXd gap = S * m;
    gap(j) -= 1.0;
    const double residual = gap.lpNorm<Eigen::Infinity>();
    if (residual > mu) throw Infeasible(static_cast<std::size_t>(j), residual);
    out.infNormResidual = std::max(out.infNormResidual, residual);
    out.M.row(j) = m.transpose();
  }
  return out;
}

DebiasMatrix computeDebiasMatrixAdaptive(const MomentEstimates& moments, double mu, int maxDoublings,
                                         const DebiasOptions& opt) {
  if (maxDoublings < 0) throw InvalidArgument("maxDoublings must be >= 0");
  for (int attempt = 0;; ++attempt) {
    try {
      return computeDebiasMatrix(moments, mu, opt);
    } catch (const Infeasible&) {
      if (attempt >= maxDoublings) throw;
      mu *= 2.0;
    }
  }
}

double defaultDebiasMu(std::size_t n, std::size_t d) {
  if (d < 2 || n < 1) throw InvalidArgument("default mu requires d >= 2 and n >= 1");
  return 0.1 * std::sqrt(std::log(static_cast<double>(d)) / static_cast<double>(n));
}

DebiasResult debias(const MomentEstimates& moments, const Eigen::Ref<const Eigen::VectorXd>& betaLasso,
                    const QuantizedDataset& ds, const Eigen::Ref<const Eigen::MatrixXd>& M, double level) {
  const Eigen::Index d = moments.sigmaXyHat.size();
  if (betaLasso.size() != d || M.rows() != d || M.cols() != d || static_cast<Eigen::Index>(ds.d()) != d) {
    throw InvalidArgument("dimension mismatch in debias");
  }
  DebiasResult out;
  out.level = level;
  out.M = M;
  out.betaDb = betaLasso + M * (moments.sigmaXyHat - moments.sigmaHat * betaLasso);
  const Eigen::MatrixXd V = residualCovariance(ds, betaLasso);
  out.perCoordVar = (M * V * M.transpose()).diagonal() / static_cast<double>(ds.n());
  out.stdErrors = out.perCoordVar.cwiseMax(0.0).cwiseSqrt();
  out.ci = normalIntervals(out.betaDb, out.stdErrors, level);
  out.infNormResidual =
      (M * moments.sigmaHat - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace bitreg
