#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace bitreg {

/// d = 1 Gaussian design: X ~ N(0, 1), Y = betaStar X + sigma eps, both
/// quantized with dither ranges [-R, R] and [-L, L].
struct ScalarModel {
  double betaStar = 0.0;
  double sigma = 1.0;
  double R = 1.0;
  double L = 1.0;

  /// Throws InvalidArgument unless sigma, R, L > 0 and all finite.
  void validate() const;
  ScalarModel withBeta(double beta) const {
    ScalarModel m = *this;
    m.betaStar = beta;
    return m;
  }
};

/// P(X > a, Y > b) = int_a^inf phi(x) Phi((beta x - b) / sigma) dx.
double orthantProbability(double a, double b, const ScalarModel& model, double absTol = 1e-10);

/// Collision probability pi = P(sign Xt = sign Yt) = 2 P(Xt > 0, Yt > 0).
/// Integrates over x the product of the conditional sign probabilities, with
/// the noise average in closed form. Accurate to roughly 1e-13, which the
/// finite-difference derivative relies on.
double collisionProbability(const ScalarModel& model);

/// Same quantity by direct averaging of the orthant probability over the two
/// dithers (nested adaptive quadrature). Slower and less accurate; an
/// independent cross-check of collisionProbability.
double collisionProbabilityNested(const ScalarModel& model, double absTol = 1e-7);

enum class DerivativeStencil {
  RichardsonCentral,  // (4 D(h/2) - D(h)) / 3 with D the central difference
  FivePoint,          // (-f(+2h) + 8 f(+h) - 8 f(-h) + f(-2h)) / 12h
};

/// d pi / d beta at model.betaStar, h = 1e-4 max(1, |betaStar|).
double collisionProbabilityDerivative(const ScalarModel& model,
                                      DerivativeStencil stencil = DerivativeStencil::RichardsonCentral);

struct FisherInformation {
  double pi = 0.0;
  double piDot = 0.0;
  double information = 0.0;  // piDot^2 (1/pi + 1/(1 - pi))
};

FisherInformation fisherInformation(const ScalarModel& model);

/// sum_i c_i log pi(beta) + (1 - c_i) log(1 - pi(beta)); 0 for no data.
/// Throws NumericalError when pi(beta) rounds to 0 or 1.
double logLikelihood(std::span<const std::uint8_t> collisions, double beta, const ScalarModel& context);
/// Same from sufficient statistics: k collisions out of n.
double logLikelihood(std::size_t collisions, std::size_t n, double beta, const ScalarModel& context);

struct MleResult {
  double beta = 0.0;
  double logLikelihood = 0.0;
  bool atBoundary = false;  // maximizer sits at an end of the search interval
  std::size_t evaluations = 0;
};

/// Maximizes the log-likelihood over [lo, hi] by Brent's method (|d beta| < tol).
/// A maximizer at an endpoint (e.g. all bits equal) is returned with
/// atBoundary = true rather than thrown.
MleResult fitMle(std::size_t collisions, std::size_t n, const ScalarModel& context, double lo,
                 double hi, double tol = 1e-7);
MleResult fitMle(std::span<const std::uint8_t> collisions, const ScalarModel& context, double lo,
                 double hi, double tol = 1e-7);

/// Brute-force simulation: n quantized (X, Y) pairs from the model, returns
/// the number of sign collisions. Sample i uses stream index `firstIndex + i`.
std::size_t simulateCollisions(const ScalarModel& model, std::size_t n, std::uint64_t seed,
                               std::uint64_t firstIndex = 0);

}  // namespace bitreg
