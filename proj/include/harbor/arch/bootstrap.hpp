#ifndef HARBOR_ARCH_BOOTSTRAP_HPP
#define HARBOR_ARCH_BOOTSTRAP_HPP

#include "harbor/arch/activity.hpp"
#include "harbor/est/event_study.hpp"

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace harbor::arch {

/// One bootstrap draw's panel: parishes resampled with replacement (each
/// copy is its own cluster/unit) and probabilities averaged over a
/// resampled multiset of Monte Carlo replicates.
struct ResampledPanel {
    std::vector<int> parish_orig;    // original parish index per row
    std::vector<double> probability; // row-major rows x years, prior-scaled
    const std::vector<int>* years = nullptr;

    double at(int row, int g) const {
        return probability[static_cast<std::size_t>(row) * years->size() + g];
    }
};

/// Statistic recomputed per draw; returns one value per coefficient.
using PanelEstimator = std::function<std::vector<double>(const ResampledPanel&)>;

struct BootstrapResult {
    std::vector<std::vector<double>> draws; // n_boot x n_coef
    std::vector<double> se;                 // sd of draws per coefficient
    std::vector<std::pair<double, double>> percentile_ci; // 2.5 / 97.5 percent
};

/// Clustered bootstrap over (parishes, Monte Carlo replicates): each draw
/// resamples parish clusters with replacement and replicate indices with
/// replacement, rebuilds the probability panel, and re-runs the estimator.
/// Draw d uses substream (seed, d), so results are bit-identical for any
/// thread count.
BootstrapResult clustered_bootstrap(const ActivityPanel& panel, const PanelEstimator& estimator,
                                    int n_boot, std::uint64_t seed, unsigned threads = 1);

/// Event-study estimator over a (resampled) activity panel. Treatment is the
/// per-original-parish intensity (dummy or delta log MA); coefficients come
/// back in estimation order (reference year skipped).
PanelEstimator make_event_study_estimator(std::vector<double> unit_treatment,
                                          int reference_year);

/// TWFE event study on the full activity panel (identity resample) with
/// analytic cluster-robust standard errors.
est::EventStudyFit arch_event_study(const ActivityPanel& panel,
                                    std::span<const double> unit_treatment, int reference_year);

/// Replaces a fit's standard errors (and z-based p-values) with bootstrap
/// ones; the draw order must match the fit's estimation order.
void apply_bootstrap_se(est::EventStudyFit& fit, const BootstrapResult& boot);

} // namespace harbor::arch

#endif
