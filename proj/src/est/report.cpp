#include "harbor/est/report.hpp"

#include "harbor/util/errors.hpp"
#include "harbor/util/stats.hpp"

#include <algorithm>
#include <cmath>

namespace harbor::est {

double bonferroni_adjust_p(double p, int m) {
    if (m < 1) throw ConfigError("bonferroni: m must be >= 1");
    return std::min(1.0, static_cast<double>(m) * p);
}

double bonferroni_critical_z(int m, double level) {
    if (m < 1) throw ConfigError("bonferroni: m must be >= 1");
    // Critical value at the corrected level 0.05/m, i.e. the inverse normal
    // at 1 - level/m (3.125 for the 56-test suite).
    const double alpha = level / static_cast<double>(m);
    return normal_quantile(1.0 - alpha);
}

double ape_share(double beta, double mean_occ_treated, double mean_pop_treated) {
    if (mean_pop_treated <= 0.0) {
        throw NumericError("ape_share: mean population must be positive");
    }
    if (mean_occ_treated < 0.0) {
        throw NumericError("ape_share: mean occupation count must be nonnegative");
    }
    return mean_occ_treated * beta / mean_pop_treated;
}

double percent_from_logpoints(double beta) {
    return 100.0 * std::expm1(beta);
}

} // namespace harbor::est
