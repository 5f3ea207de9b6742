#pragma once

#include <cmath>
#include <cstddef>
#include <algorithm>
#include <string>
#include <vector>

#include "bitreg/error.hpp"

namespace bitreg {

struct QuadratureOptions {
  double absTol = 1e-10;
  double relTol = 0.0;
  std::size_t maxSubdivisions = 2000;
};

struct QuadratureResult {
  double value = 0.0;
  double errorEstimate = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

// 7-point Gauss / 15-point Kronrod pair on [a, b].
template <typename Func>
Panel gaussKronrod15(const Func& f, double a, double b) {
  static constexpr double xgk[8] = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wgk[8] = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = wgk[7] * fc;
  double gauss = wg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * xgk[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += wgk[j] * sum;
    if (j % 2 == 1) gauss += wg[j / 2] * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b]: the panel
/// with the largest error estimate is bisected until the summed estimate
/// meets max(absTol, relTol * |I|). Throws QuadratureError when the
/// subdivision budget runs out.
template <typename Func>
QuadratureResult integrate(const Func& f, double a, double b, const QuadratureOptions& opt = {}) {
  QuadratureResult result;
  if (a == b) return result;
  std::vector<detail::Panel> panels{detail::gaussKronrod15(f, a, b)};
  result.evaluations = 15;
  double value = panels.front().value;
  double error = panels.front().error;
  std::size_t subdivisions = 0;
  while (error > std::max(opt.absTol, opt.relTol * std::abs(value))) {
    if (subdivisions++ >= opt.maxSubdivisions) {
      throw QuadratureError("adaptive quadrature did not converge (error estimate " +
                            std::to_string(error) + ")");
    }
    std::pop_heap(panels.begin(), panels.end());
    const detail::Panel worst = panels.back();
    panels.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    panels.push_back(detail::gaussKronrod15(f, worst.a, mid));
    std::push_heap(panels.begin(), panels.end());
    panels.push_back(detail::gaussKronrod15(f, mid, worst.b));
    std::push_heap(panels.begin(), panels.end());
    result.evaluations += 30;
    // Re-sum instead of updating incrementally to avoid drift.
    value = 0.0;
    error = 0.0;
    for (const auto& panel : panels) {
      value += panel.value;
      error += panel.error;
    }
  }
  result.value = value;
  result.errorEstimate = error;
  return result;
}

}  // namespace bitreg
