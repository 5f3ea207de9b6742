#pragma once

#include <span>

namespace bitreg {

double normalPdf(double x);
double normalCdf(double x);

/// Inverse of the standard normal CDF on (0, 1). Rational initial guess
/// refined by one Halley step; absolute error well below 1e-12.
double normalQuantile(double p);

/// Two-sided normal critical value z_{1-(1-level)/2}.
double normalCriticalValue(double level);

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and
/// the standard normal CDF.
double ksStatisticNormal(std::span<const double> samples);

}  // namespace bitreg
