#pragma once

namespace psyscale {

/// Standard normal CDF.
double normal_cdf(double x);

/// log(normal_cdf(x)), accurate far into the lower tail where normal_cdf
/// underflows.
double log_normal_cdf(double x);

/// pdf(x) / cdf(x), the derivative of log_normal_cdf.
double inverse_mills_ratio(double x);

}  // namespace psyscale
