#ifndef HARBOR_EST_EVENT_STUDY_HPP
#define HARBOR_EST_EVENT_STUDY_HPP

#include "harbor/est/transforms.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace harbor::est {

/// One panel cell. `unit` and `time_index` are dense indices (time_index
/// points into the fit's year list).
struct PanelRow {
    int unit = 0;
    int time_index = 0;
    double outcome = 0.0;
};

struct EventStudyOptions {
    std::vector<int> years; // sorted event years, indexed by PanelRow::time_index
    int reference_year = 1801;
    /// Multiplicity used for the per-fit Bonferroni column. Zero means "use
    /// the number of estimated terms in this fit"; cross-fit suites override
    /// at reporting time.
    int bonferroni_m = 0;
};

struct EventStudyTerm {
    int year = 0;
    std::string treatment;
    double beta = 0.0;
    double se = 0.0;
    double p = 1.0;
    double p_bonferroni = 1.0;
    /// Omitted category: beta is structurally zero, not estimated.
    bool is_reference = false;
};

struct EventStudyFit {
    std::vector<EventStudyTerm> terms;
    /// Covariance of the estimated (non-reference) terms, in `terms` order
    /// with reference terms skipped.
    Eigen::MatrixXd vcov;
    int n_obs = 0;
    int n_clusters = 0;
    int n_parishes_included = 0;
    int reference_year = 0;

    const EventStudyTerm& term(int year, const std::string& treatment = "") const;
    /// Estimated coefficients in estimation order (reference terms skipped).
    std::vector<double> coefficients() const;
};

/// Two-way fixed-effects event study with arbitrary unit-level treatment
/// intensities:
///   y_it = a_i + a_t + sum_v sum_{j != ref} 1[t=j] * treat_v(i) * beta_{vj} + e_it
/// estimated by within-demeaning (alternating projections, handles
/// unbalanced panels) followed by least squares on the interaction block.
/// Standard errors are CR1 cluster-robust at the unit level with model
/// parameter count n_units + n_times - 1 + n_interactions.
EventStudyFit twfe_interactions(std::span<const PanelRow> rows, int n_units,
                                const std::vector<std::vector<double>>& unit_treatments,
                                const std::vector<std::string>& treatment_labels,
                                const EventStudyOptions& opts);

/// Single treatment variable (dummy or continuous).
EventStudyFit twfe_event_study(std::span<const PanelRow> rows, int n_units,
                               std::span<const double> unit_treatment,
                               const EventStudyOptions& opts);

/// Three simultaneous region-dummy treatments (west, middle, east).
/// region_of holds 0 = west, 1 = middle, 2 = east, 3 = reference per unit.
EventStudyFit three_region_event_study(std::span<const PanelRow> rows, int n_units,
                                       std::span<const int> region_of,
                                       const EventStudyOptions& opts);

} // namespace harbor::est

#endif
