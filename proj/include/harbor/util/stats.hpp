#ifndef HARBOR_UTIL_STATS_HPP
#define HARBOR_UTIL_STATS_HPP

#include <span>
#include <vector>

namespace harbor {

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF (Wichura's AS 241, double precision).
double normal_quantile(double p);

/// Two-sided p-value for a z statistic.
double two_sided_p(double z);

double mean(std::span<const double> xs);

/// Sample variance (n-1 denominator); 0 for fewer than 2 values.
double sample_variance(std::span<const double> xs);

double sample_sd(std::span<const double> xs);

} // namespace harbor

#endif
