#include "harbor/arch/findings.hpp"

#include "harbor/util/csv.hpp"
#include "harbor/util/errors.hpp"
#include "harbor/util/stats.hpp"

#include <algorithm>
#include <cmath>

namespace harbor::arch {

FindingKind finding_kind_from_name(const std::string& name) {
    if (name == "coin" || name == "coins") return FindingKind::Coin;
    if (name == "building" || name == "buildings") return FindingKind::Building;
    throw DataError("unknown finding kind '" + name + "'");
}

DatingModel dating_model_from_name(const std::string& name) {
    if (name == "uniform") return DatingModel::Uniform;
    if (name == "normal") return DatingModel::Normal;
    throw ConfigError("unknown dating model '" + name + "'");
}

DatingDistribution make_dating_distribution(const FindingRecord& finding) {
    if (finding.y_min > finding.y_max) {
        throw DataError("finding '" + finding.finding_id + "': y_min > y_max");
    }
    DatingDistribution dist;
    if (finding.dating_model == DatingModel::Uniform || finding.y_min == finding.y_max) {
        const int span = finding.y_max - finding.y_min + 1;
        dist.first_year = finding.y_min;
        dist.pmf.assign(static_cast<std::size_t>(span), 1.0 / span);
    } else {
        const double mu = 0.5 * (finding.y_min + finding.y_max);
        const double sigma = (finding.y_max - finding.y_min) / (2.0 * 1.96);
        // Support out to 8 sigma covers the distribution to ~1e-15.
        const int lo = static_cast<int>(std::floor(mu - 8.0 * sigma));
        const int hi = static_cast<int>(std::ceil(mu + 8.0 * sigma));
        dist.first_year = lo;
        dist.pmf.resize(static_cast<std::size_t>(hi - lo + 1));
        double total = 0.0;
        for (int t = lo; t <= hi; ++t) {
            const double w = normal_cdf((t + 0.5 - mu) / sigma) - normal_cdf((t - 0.5 - mu) / sigma);
            dist.pmf[static_cast<std::size_t>(t - lo)] = w;
            total += w;
        }
        for (double& w : dist.pmf) w /= total;
    }
    dist.cdf.resize(dist.pmf.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.pmf.size(); ++i) {
        acc += dist.pmf[i];
        dist.cdf[i] = acc;
    }
    dist.cdf.back() = 1.0;
    return dist;
}

double dating_probability(const FindingRecord& finding, int t) {
    return make_dating_distribution(finding).pmf_at(t);
}

int DatingDistribution::sample(Rng& rng) const {
    if (pmf.size() == 1) {
        // Point dating: consume one uniform anyway so that the stream
        // position is independent of the dating interval.
        (void)rng.next_unit();
        return first_year;
    }
    const double u = rng.next_unit();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t i = std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    return first_year + static_cast<int>(i);
}

std::vector<FindingRecord> read_findings_csv(
    const std::filesystem::path& path,
    std::span<const std::pair<std::string, geo::Polygon>> parish_polygons, DatingModel model,
    const FindingsFilter& filter, std::vector<std::string>* warnings) {
    const CsvTable t = read_csv(path);
    const std::size_t c_id = t.col("finding_id");
    const std::size_t c_lon = t.col("lon");
    const std::size_t c_lat = t.col("lat");
    const std::size_t c_kind = t.col("kind");
    const std::size_t c_ymin = t.col("year_min");
    const std::size_t c_ymax = t.col("year_max");

    std::vector<FindingRecord> out;
    for (const auto& row : t.rows) {
        FindingRecord rec;
        rec.finding_id = row[c_id];
        rec.kind = finding_kind_from_name(row[c_kind]);
        rec.y_min = static_cast<int>(parse_long(row[c_ymin], path.string()));
        rec.y_max = static_cast<int>(parse_long(row[c_ymax], path.string()));
        rec.dating_model = model;
        if (rec.y_min > rec.y_max) {
            throw DataError("findings csv: y_min > y_max for '" + rec.finding_id + "'");
        }
        if (rec.y_min < filter.period_min || rec.y_max > filter.period_max) {
            if (warnings) {
                warnings->push_back("finding '" + rec.finding_id + "' outside " +
                                    std::to_string(filter.period_min) + "-" +
                                    std::to_string(filter.period_max) + "; dropped");
            }
            continue;
        }
        const geo::Point where{parse_double(row[c_lon], path.string()),
                               parse_double(row[c_lat], path.string())};
        rec.parish_id.clear();
        for (const auto& [pid, poly] : parish_polygons) {
            if (geo::point_in_polygon(where, poly)) {
                rec.parish_id = pid;
                break;
            }
        }
        if (rec.parish_id.empty()) {
            if (warnings) {
                warnings->push_back("finding '" + rec.finding_id +
                                    "' outside all parish polygons; dropped");
            }
            continue;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace harbor::arch
