#include "bitreg/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bitreg/error.hpp"
#include "bitreg/normal.hpp"
#include "bitreg/quadrature.hpp"
#include "bitreg/quantize.hpp"
#include "bitreg/rng.hpp"

namespace bitreg {

void ScalarModel::validate() const {
  if (!std::isfinite(betaStar) || !std::isfinite(sigma) || !std::isfinite(R) || !std::isfinite(L)) {
    throw InvalidArgument("scalar model parameters must be finite");
  }
  if (!(sigma > 0.0) || !(R > 0.0) || !(L > 0.0)) throw InvalidArgument("sigma, R and L must be > 0");
}

namespace {

// Beyond this |x| the standard normal density is below 1e-300.
constexpr double kTail = 40.0;

// E[(t + eps)_+] for eps ~ N(0, 1).
double expectedPositivePart(double t) { return t * normalCdf(t) + normalPdf(t); }

// P(Yt > 0 | X = x): noise-averaged dither probability clamp((y + L) / 2L, 0, 1).
double responseUpperProbability(double x, const ScalarModel& m) {
  const double mean = m.betaStar * x;
  return m.sigma / (2.0 * m.L) *
         (expectedPositivePart((mean + m.L) / m.sigma) - expectedPositivePart((mean - m.L) / m.sigma));
}

}  // namespace

double orthantProbability(double a, double b, const ScalarModel& model, double absTol) {
  model.validate();
  const double upper = std::max(a, 0.0) + kTail;
  if (a >= upper) return 0.0;
  const double lower = std::max(a, -kTail);
  QuadratureOptions opt;
  opt.absTol = absTol;
  auto f = [&](double x) { return normalPdf(x) * normalCdf((model.betaStar * x - b) / model.sigma); };
  return integrate(f, lower, upper, opt).value;
}

double collisionProbability(const ScalarModel& model) {
  model.validate();
  QuadratureOptions opt;
  opt.absTol = 1e-14;
  opt.maxSubdivisions = 5000;
  const double R = model.R;
  auto inside = [&](double x) {
    return normalPdf(x) * ((x + R) / (2.0 * R)) * responseUpperProbability(x, model);
  };
  auto beyond = [&](double x) { return normalPdf(x) * responseUpperProbability(x, model); };
  // P(Xt > 0 | x) is (x + R) / 2R on [-R, R], 1 above, 0 below.
  const double a = std::min(R, kTail);
  const double inner = integrate(inside, -a, a, opt).value;
  const double tail = R < kTail ? integrate(beyond, R, kTail, opt).value : 0.0;
  return 2.0 * (inner + tail);
}

double collisionProbabilityNested(const ScalarModel& model, double absTol) {
  model.validate();
  QuadratureOptions outerOpt;
  outerOpt.absTol = absTol;
  QuadratureOptions innerOpt;
  innerOpt.absTol = absTol * 0.1;
  // Xt > 0 iff X + z1 > 0 with z1 ~ U[-R, R]; likewise Yt with z2 ~ U[-L, L].
  auto overZ2 = [&](double z1) {
    auto g = [&](double z2) { return orthantProbability(-z1, -z2, model, innerOpt.absTol * 0.1); };
    return integrate(g, -model.L, model.L, innerOpt).value / (2.0 * model.L);
  };
  const double avg = integrate(overZ2, -model.R, model.R, outerOpt).value / (2.0 * model.R);
  return 2.0 * avg;
}

double collisionProbabilityDerivative(const ScalarModel& model, DerivativeStencil stencil) {
  model.validate();
  const double b = model.betaStar;
  const double h = 1e-4 * std::max(1.0, std::abs(b));
  auto pi = [&](double beta) { return collisionProbability(model.withBeta(beta)); };
  if (stencil == DerivativeStencil::FivePoint) {
    return (-pi(b + 2 * h) + 8 * pi(b + h) - 8 * pi(b - h) + pi(b - 2 * h)) / (12 * h);
  }
  const double coarse = (pi(b + h) - pi(b - h)) / (2 * h);
  const double fine = (pi(b + h / 2) - pi(b - h / 2)) / h;
  return (4 * fine - coarse) / 3;
}

FisherInformation fisherInformation(const ScalarModel& model) {
  FisherInformation out;
  out.pi = collisionProbability(model);
  out.piDot = collisionProbabilityDerivative(model);
  if (!(out.pi > 0.0 && out.pi < 1.0)) throw NumericalError("collision probability at 0 or 1");
  out.information = out.piDot * out.piDot * (1.0 / out.pi + 1.0 / (1.0 - out.pi));
  return out;
}

double logLikelihood(std::size_t collisions, std::size_t n, double beta, const ScalarModel& context) {
  if (collisions > n) throw InvalidArgument("more collisions than samples");
  if (n == 0) return 0.0;
  const double pi = collisionProbability(context.withBeta(beta));
  if (!(pi > 0.0 && pi < 1.0)) throw NumericalError("collision probability rounds to 0 or 1; ranges too extreme");
  const double k = static_cast<double>(collisions);
  return k * std::log(pi) + (static_cast<double>(n) - k) * std::log1p(-pi);
}

double logLikelihood(std::span<const std::uint8_t> collisions, double beta, const ScalarModel& context) {
  std::size_t k = 0;
  for (const auto c : collisions) k += c != 0;
  return logLikelihood(k, collisions.size(), beta, context);
}

MleResult fitMle(std::size_t collisions, std::size_t n, const ScalarModel& context, double lo, double hi,
                 double tol) {
  context.validate();
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw InvalidArgument("invalid search interval");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be > 0");
  MleResult out;
  auto objective = [&](double beta) {
    ++out.evaluations;
    return -logLikelihood(collisions, n, beta, context);
  };

  // Brent's minimization (golden section with parabolic steps).
  const double golden = 0.5 * (3.0 - std::sqrt(5.0));
  double a = lo, b = hi;
  double x = a + golden * (b - a);
  double w = x, v = x;
  double fx = objective(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    const double mid = 0.5 * (a + b);
    const double tol1 = tol * 0.5 + std::numeric_limits<double>::epsilon() * std::abs(x);
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - mid) <= tol2 - 0.5 * (b - a)) break;
    bool useGolden = true;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double eOld = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * eOld) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = mid > x ? tol1 : -tol1;
        useGolden = false;
      }
    }
    if (useGolden) {
      e = (x >= mid ? a : b) - x;
      d = golden * e;
    }
    const double u = std::abs(d) >= tol1 ? x + d : x + (d > 0 ? tol1 : -tol1);
    const double fu = objective(u);
    if (fu <= fx) {
      (u >= x ? a : b) = x;
      v = w, fv = fw;
      w = x, fw = fx;
      x = u, fx = fu;
    } else {
      (u < x ? a : b) = u;
      if (fu <= fw || w == x) {
        v = w, fv = fw;
        w = u, fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u, fv = fu;
      }
    }
  }
  // Brent never evaluates the endpoints; compare against them explicitly.
  for (const double edge : {lo, hi}) {
    const double fe = objective(edge);
    if (fe < fx) x = edge, fx = fe;
  }
  out.beta = x;
  out.logLikelihood = -fx;
  out.atBoundary = std::abs(x - lo) <= 4 * tol || std::abs(hi - x) <= 4 * tol;
  return out;
}

MleResult fitMle(std::span<const std::uint8_t> collisions, const ScalarModel& context, double lo, double hi,
                 double tol) {
  std::size_t k = 0;
  for (const auto c : collisions) k += c != 0;
  return fitMle(k, collisions.size(), context, lo, hi, tol);
}

std::size_t simulateCollisions(const ScalarModel& model, std::size_t n, std::uint64_t seed,
                               std::uint64_t firstIndex) {
  model.validate();
  const auto xRange = QuantizerRange::symmetric(model.R);
  const auto yRange = QuantizerRange::symmetric(model.L);
  std::size_t collisions = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t index = firstIndex + i;
    const double x = standardNormal(seed, index, 0, StreamTag::Design);
    const double y = model.betaStar * x + model.sigma * standardNormal(seed, index, 0, StreamTag::Noise);
    const bool xUp = quantizeScalar(x, xRange, uniform01(seed, index, 0, StreamTag::QuantX)).upper;
    const bool yUp = quantizeScalar(y, yRange, uniform01(seed, index, 0, StreamTag::QuantY)).upper;
    collisions += xUp == yUp;
  }
  return collisions;
}

}  // namespace bitreg
