#ifndef HARBOR_EST_REPORT_HPP
#define HARBOR_EST_REPORT_HPP

namespace harbor::est {

/// Bonferroni-adjusted p-value: min(1, m * p).
double bonferroni_adjust_p(double p, int m);

/// Two-sided z critical value at family level `level` over m tests,
/// i.e. the inverse normal at 1 - (level/m)/2. Confidence intervals for the
/// occupation suite use m = 56.
double bonferroni_critical_z(int m, double level = 0.05);

/// Average-partial-effect share: mean outcome x beta / mean population,
/// the implied share of an average parish gaining the occupation.
double ape_share(double beta, double mean_occ_treated, double mean_pop_treated);

/// 100 * (exp(beta) - 1): log-points to percent.
double percent_from_logpoints(double beta);

} // namespace harbor::est

#endif
