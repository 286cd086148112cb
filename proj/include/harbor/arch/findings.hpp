#ifndef HARBOR_ARCH_FINDINGS_HPP
#define HARBOR_ARCH_FINDINGS_HPP

#include "harbor/geo/geometry.hpp"
#include "harbor/util/rng.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace harbor::arch {

enum class FindingKind { Coin, Building };
enum class DatingModel { Uniform, Normal };

FindingKind finding_kind_from_name(const std::string& name);
DatingModel dating_model_from_name(const std::string& name);

/// Interval-dated archaeological site already resolved to a parish.
struct FindingRecord {
    std::string finding_id;
    std::string parish_id;
    FindingKind kind = FindingKind::Coin;
    int y_min = 0;
    int y_max = 0;
    DatingModel dating_model = DatingModel::Uniform;
};

/// P(t | finding) at integer year t.
/// Uniform: 1/(y_max - y_min + 1) on [y_min, y_max] (inclusive span, so
/// point datings get probability one).
/// Normal: the dating range read as a 95% confidence interval, mu at the
/// midpoint and sigma = (y_max - y_min)/(2 * 1.96), discretized to integer
/// years as unit-interval normal mass and renormalized.
double dating_probability(const FindingRecord& finding, int t);

/// Discrete dating distribution ready for sampling. Immutable; shared
/// across Monte Carlo replicates.
struct DatingDistribution {
    int first_year = 0;
    std::vector<double> pmf;
    std::vector<double> cdf;

    double pmf_at(int t) const {
        const int i = t - first_year;
        return (i >= 0 && i < static_cast<int>(pmf.size())) ? pmf[static_cast<std::size_t>(i)]
                                                            : 0.0;
    }
    /// Inverse-CDF draw of an integer year.
    int sample(Rng& rng) const;
};

DatingDistribution make_dating_distribution(const FindingRecord& finding);

struct FindingsFilter {
    int period_min = 750;
    int period_max = 1500;
};

/// findings.csv rows: finding_id, lon, lat, kind, year_min, year_max.
/// Coordinates are resolved against the parish polygons; findings outside
/// every polygon, outside the period, or of other kinds are dropped with a
/// warning.
std::vector<FindingRecord> read_findings_csv(
    const std::filesystem::path& path,
    std::span<const std::pair<std::string, geo::Polygon>> parish_polygons, DatingModel model,
    const FindingsFilter& filter = {}, std::vector<std::string>* warnings = nullptr);

} // namespace harbor::arch

#endif
