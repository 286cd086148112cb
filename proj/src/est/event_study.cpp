#include "harbor/est/event_study.hpp"

#include "harbor/est/linreg.hpp"
#include "harbor/est/report.hpp"
#include "harbor/util/errors.hpp"
#include "harbor/util/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace harbor::est {

namespace {

// Alternating unit/time demeaning of y and every column of W in place.
// Converges in one pass for balanced panels; iterates for unbalanced ones.
void within_demean(std::span<const PanelRow> rows, int n_units, int n_times, Eigen::VectorXd& y,
                   Eigen::MatrixXd& W) {
    const Eigen::Index n = y.size();
    const Eigen::Index k = W.cols();
    std::vector<double> unit_count(n_units, 0.0), time_count(n_times, 0.0);
    for (const PanelRow& r : rows) {
        unit_count[r.unit] += 1.0;
        time_count[r.time_index] += 1.0;
    }

    Eigen::VectorXd unit_sum(n_units), time_sum(n_times);
    constexpr int kMaxSweeps = 200;
    constexpr double kTol = 1e-12;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double shift = 0.0;
        for (Eigen::Index col = -1; col < k; ++col) {
            Eigen::Ref<Eigen::VectorXd> vec =
                (col < 0) ? Eigen::Ref<Eigen::VectorXd>(y) : Eigen::Ref<Eigen::VectorXd>(W.col(col));

            unit_sum.setZero();
            for (Eigen::Index i = 0; i < n; ++i) unit_sum[rows[i].unit] += vec[i];
            for (int u = 0; u < n_units; ++u) {
                if (unit_count[u] > 0.0) unit_sum[u] /= unit_count[u];
            }
            for (Eigen::Index i = 0; i < n; ++i) vec[i] -= unit_sum[rows[i].unit];

            time_sum.setZero();
            for (Eigen::Index i = 0; i < n; ++i) time_sum[rows[i].time_index] += vec[i];
            for (int t = 0; t < n_times; ++t) {
                if (time_count[t] > 0.0) time_sum[t] /= time_count[t];
            }
            for (Eigen::Index i = 0; i < n; ++i) vec[i] -= time_sum[rows[i].time_index];

            shift = std::max({shift, unit_sum.cwiseAbs().maxCoeff(),
                              time_sum.cwiseAbs().maxCoeff()});
        }
        if (shift < kTol) break;
    }
}

} // namespace

const EventStudyTerm& EventStudyFit::term(int year, const std::string& treatment) const {
    for (const auto& t : terms) {
        if (t.year == year && (treatment.empty() || t.treatment == treatment)) return t;
    }
    throw DataError("event study: no term for year " + std::to_string(year) +
                    (treatment.empty() ? "" : " treatment " + treatment));
}

std::vector<double> EventStudyFit::coefficients() const {
    std::vector<double> out;
    for (const auto& t : terms) {
        if (!t.is_reference) out.push_back(t.beta);
    }
    return out;
}

EventStudyFit twfe_interactions(std::span<const PanelRow> rows, int n_units,
                                const std::vector<std::vector<double>>& unit_treatments,
                                const std::vector<std::string>& treatment_labels,
                                const EventStudyOptions& opts) {
    if (unit_treatments.size() != treatment_labels.size() || unit_treatments.empty()) {
        throw ConfigError("event study: treatment vectors and labels must align");
    }
    const int n_times = static_cast<int>(opts.years.size());
    if (n_times < 2) throw DataError("event study: need at least 2 event years");
    for (int t = 1; t < n_times; ++t) {
        if (opts.years[t] <= opts.years[t - 1]) {
            throw ConfigError("event study: event years must be strictly increasing");
        }
    }
    const auto ref_it = std::find(opts.years.begin(), opts.years.end(), opts.reference_year);
    if (ref_it == opts.years.end()) {
        throw ConfigError("event study: reference year " + std::to_string(opts.reference_year) +
                          " not in the event year set");
    }
    const int ref_index = static_cast<int>(ref_it - opts.years.begin());

    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    if (n == 0) throw DataError("event study: empty panel");
    std::vector<char> seen(static_cast<std::size_t>(n_units) * n_times, 0);
    std::vector<char> unit_present(n_units, 0);
    for (const PanelRow& r : rows) {
        if (r.unit < 0 || r.unit >= n_units || r.time_index < 0 || r.time_index >= n_times) {
            throw DataError("event study: row index out of range");
        }
        auto& cell = seen[static_cast<std::size_t>(r.unit) * n_times + r.time_index];
        if (cell) throw DataError("event study: duplicate (unit, year) cell");
        cell = 1;
        unit_present[r.unit] = 1;
    }
    const int units_present =
        static_cast<int>(std::count(unit_present.begin(), unit_present.end(), 1));
    if (units_present < 2) throw NumericError("event study: fewer than 2 clusters");
    for (const auto& tv : unit_treatments) {
        if (static_cast<int>(tv.size()) != n_units) {
            throw ConfigError("event study: treatment vector size mismatch");
        }
    }

    // Interaction block: one column per (treatment, non-reference year).
    const int n_vars = static_cast<int>(unit_treatments.size());
    const int k = n_vars * (n_times - 1);
    Eigen::VectorXd y(n);
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        const PanelRow& r = rows[i];
        y[i] = r.outcome;
        if (r.time_index != ref_index) {
            const int jcol = r.time_index < ref_index ? r.time_index : r.time_index - 1;
            for (int v = 0; v < n_vars; ++v) {
                W(i, v * (n_times - 1) + jcol) = unit_treatments[v][r.unit];
            }
        }
    }

    within_demean(rows, n_units, n_times, y, W);

    const Eigen::VectorXd beta = ols_solve(W, y);
    const Eigen::VectorXd resid_vec = y - W * beta;
    const Eigen::MatrixXd xtx_inv = (W.transpose() * W).inverse();

    std::vector<double> resid(resid_vec.data(), resid_vec.data() + resid_vec.size());
    std::vector<int> cluster_of(rows.size());
    // Clusters are the units actually present, renumbered densely.
    std::vector<int> unit_to_cluster(n_units, -1);
    int n_clusters = 0;
    for (int u = 0; u < n_units; ++u) {
        if (unit_present[u]) unit_to_cluster[u] = n_clusters++;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        cluster_of[i] = unit_to_cluster[rows[i].unit];
    }

    const int k_model = units_present + n_times - 1 + k;
    FitInternals internals{W, xtx_inv, resid, cluster_of, n_clusters, k_model};
    const Eigen::MatrixXd vcov = cluster_robust_vcov(internals);

    EventStudyFit fit;
    fit.vcov = vcov;
    fit.n_obs = static_cast<int>(n);
    fit.n_clusters = n_clusters;
    fit.n_parishes_included = units_present;
    fit.reference_year = opts.reference_year;
    const int m = opts.bonferroni_m > 0 ? opts.bonferroni_m : k;
    for (int v = 0; v < n_vars; ++v) {
        for (int t = 0; t < n_times; ++t) {
            EventStudyTerm term;
            term.year = opts.years[t];
            term.treatment = treatment_labels[v];
            if (t == ref_index) {
                term.is_reference = true;
                term.beta = 0.0;
                term.se = 0.0;
                term.p = 1.0;
                term.p_bonferroni = 1.0;
            } else {
                const int jcol = t < ref_index ? t : t - 1;
                const int col = v * (n_times - 1) + jcol;
                term.beta = beta[col];
                term.se = std::sqrt(std::max(0.0, vcov(col, col)));
                term.p = term.se > 0.0 ? two_sided_p(term.beta / term.se)
                                       : (term.beta == 0.0 ? 1.0 : 0.0);
                term.p_bonferroni = bonferroni_adjust_p(term.p, m);
            }
            fit.terms.push_back(std::move(term));
        }
    }
    return fit;
}

EventStudyFit twfe_event_study(std::span<const PanelRow> rows, int n_units,
                               std::span<const double> unit_treatment,
                               const EventStudyOptions& opts) {
    std::vector<std::vector<double>> treatments{
        std::vector<double>(unit_treatment.begin(), unit_treatment.end())};
    return twfe_interactions(rows, n_units, treatments, {"affected"}, opts);
}

EventStudyFit three_region_event_study(std::span<const PanelRow> rows, int n_units,
                                       std::span<const int> region_of,
                                       const EventStudyOptions& opts) {
    std::vector<std::vector<double>> treatments(3, std::vector<double>(n_units, 0.0));
    for (int u = 0; u < n_units; ++u) {
        if (region_of[u] >= 0 && region_of[u] < 3) treatments[region_of[u]][u] = 1.0;
    }
    return twfe_interactions(rows, n_units, treatments, {"west", "middle", "east"}, opts);
}

} // namespace harbor::est
