#include "psyscale/mlds/normal.hpp"

#include <cmath>
#include <numbers>

namespace psyscale {

namespace {

constexpr double kTailCut = -30.0;
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// Asymptotic series for Q(x) = cdf(x) * sqrt(2 pi) * exp(x^2/2) * (-x) as x -> -inf.
double tail_series(double x) {
  const double r = 1.0 / (x * x);
  return 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * (1.0 / std::numbers::sqrt2)); }

double log_normal_cdf(double x) {
  if (x > kTailCut) return std::log(normal_cdf(x));
  return -0.5 * x * x - std::log(-x) - kLogSqrt2Pi + std::log(tail_series(x));
}

double inverse_mills_ratio(double x) {
  if (x > kTailCut) {
    const double log_pdf = -0.5 * x * x - kLogSqrt2Pi;
    return std::exp(log_pdf - log_normal_cdf(x));
  }
  return -x / tail_series(x);
}

}  // namespace psyscale
