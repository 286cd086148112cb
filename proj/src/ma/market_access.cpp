#include "harbor/ma/market_access.hpp"

#include "harbor/util/csv.hpp"
#include "harbor/util/errors.hpp"

#include <cmath>

namespace harbor::ma {

std::string region_name(Region r) {
    switch (r) {
        case Region::West: return "west";
        case Region::Middle: return "middle";
        case Region::East: return "east";
        case Region::Reference: return "reference";
    }
    return "reference";
}

Region region_from_name(const std::string& name) {
    if (name == "west") return Region::West;
    if (name == "middle") return Region::Middle;
    if (name == "east") return Region::East;
    if (name == "reference" || name.empty()) return Region::Reference;
    throw DataError("unknown region '" + name + "'");
}

double market_access_from_costs(std::span<const double> costs, double theta) {
    if (theta >= 0.0) throw ConfigError("market access: theta must be negative");
    double ma = 0.0;
    for (double c : costs) {
        if (std::isinf(c)) continue;
        ma += std::pow(c + 1.0, theta);
    }
    return ma;
}

namespace {

// Distances from the parish centroid to each port (one Dijkstra). Ports on
// plain land relocate to the nearest navigable cell; edge weights are
// symmetric, so evaluating at the relocated cell matches a run from the
// port itself.
std::vector<double> parish_to_port_costs(const ParishSite& parish, std::span<const Port> ports,
                                         const geo::CostSurface& surface) {
    const auto src = surface.snap(parish.centroid);
    if (!src) {
        throw DataError("market access: parish '" + parish.id + "' outside raster extent");
    }
    const geo::CostDistanceField field = geo::cost_distance(surface, *src);

    std::vector<double> out;
    out.reserve(ports.size());
    for (const Port& p : ports) {
        const auto cell = surface.snap(p.location);
        if (!cell) throw DataError("market access: port '" + p.id + "' outside raster extent");
        geo::CellCoord target = *cell;
        if (surface.cell(target) == geo::CellClass::Land) {
            const auto moved = surface.nearest_navigable(target);
            if (!moved) {
                out.push_back(geo::CostDistanceField::kUnreachable);
                continue;
            }
            target = *moved;
        }
        out.push_back(field.at(target));
    }
    return out;
}

} // namespace

double market_access(const ParishSite& parish, std::span<const Port> ports, double theta,
                     const geo::CostSurface& surface) {
    if (ports.empty()) throw DataError("market access: empty port set");
    const std::vector<double> costs = parish_to_port_costs(parish, ports, surface);
    return market_access_from_costs(costs, theta);
}

MarketAccessRecord delta_log_ma(const ParishSite& parish, std::span<const Port> ports,
                                double theta, const geo::CostSurface& surface) {
    bool any_baseline = false;
    for (const Port& p : ports) {
        if (p.in_baseline && !p.in_counterfactual) {
            throw DataError("market access: port '" + p.id + "' is in H but not in H*");
        }
        any_baseline = any_baseline || p.in_baseline;
    }
    if (!any_baseline) throw DataError("market access: baseline port set H is empty");

    const std::vector<double> costs = parish_to_port_costs(parish, ports, surface);
    double ma_before = 0.0, ma_after = 0.0;
    for (std::size_t i = 0; i < ports.size(); ++i) {
        if (std::isinf(costs[i])) continue;
        const double term = std::pow(costs[i] + 1.0, theta);
        if (ports[i].in_baseline) ma_before += term;
        if (ports[i].in_counterfactual) ma_after += term;
    }

    MarketAccessRecord rec;
    rec.parish_id = parish.id;
    rec.ma_before = ma_before;
    rec.ma_after = ma_after;
    rec.theta = theta;
    if (ma_before <= 0.0) {
        rec.unreachable = true;
        rec.delta_log_ma = 0.0;
    } else {
        rec.delta_log_ma = std::log(ma_after) - std::log(ma_before);
    }
    return rec;
}

std::vector<MarketAccessRecord> compute_market_access(std::span<const ParishSite> parishes,
                                                      std::span<const Port> ports, double theta,
                                                      const geo::CostSurface& surface,
                                                      unsigned threads,
                                                      std::vector<std::string>* warnings) {
    if (theta >= 0.0) throw ConfigError("market access: theta must be negative");
    if (ports.empty()) throw DataError("market access: empty port set");
    bool any_baseline = false;
    for (const Port& p : ports) {
        if (p.in_baseline && !p.in_counterfactual) {
            throw DataError("market access: port '" + p.id + "' is in H but not in H*");
        }
        any_baseline = any_baseline || p.in_baseline;
    }
    if (!any_baseline) throw DataError("market access: baseline port set H is empty");

    // Snap ports once; one Dijkstra per placed port, reused for every parish.
    std::vector<std::size_t> placed; // indices into ports
    std::vector<geo::CellCoord> sources;
    for (std::size_t i = 0; i < ports.size(); ++i) {
        const auto cell = surface.snap(ports[i].location);
        if (!cell) throw DataError("market access: port '" + ports[i].id + "' outside raster");
        geo::CellCoord c = *cell;
        if (surface.cell(c) == geo::CellClass::Land) {
            const auto moved = surface.nearest_navigable(c);
            if (!moved) {
                if (warnings) {
                    warnings->push_back("port '" + ports[i].id +
                                        "' has no navigable cell within 5 cells; unreachable");
                }
                continue;
            }
            c = *moved;
        }
        placed.push_back(i);
        sources.push_back(c);
    }

    const std::vector<geo::CostDistanceField> fields =
        geo::cost_distance_multi(surface, sources, threads);

    std::vector<MarketAccessRecord> out;
    out.reserve(parishes.size());
    for (const ParishSite& parish : parishes) {
        const auto cell = surface.snap(parish.centroid);
        if (!cell) {
            throw DataError("market access: parish '" + parish.id + "' outside raster");
        }
        double ma_before = 0.0, ma_after = 0.0;
        for (std::size_t k = 0; k < placed.size(); ++k) {
            const double d = fields[k].at(*cell);
            if (std::isinf(d)) continue;
            const double term = std::pow(d + 1.0, theta);
            const Port& p = ports[placed[k]];
            if (p.in_baseline) ma_before += term;
            if (p.in_counterfactual) ma_after += term;
        }
        MarketAccessRecord rec;
        rec.parish_id = parish.id;
        rec.ma_before = ma_before;
        rec.ma_after = ma_after;
        rec.theta = theta;
        if (ma_before <= 0.0) {
            rec.unreachable = true;
            rec.delta_log_ma = 0.0;
            if (warnings) {
                warnings->push_back("parish '" + parish.id +
                                    "' unreachable from every baseline port; excluded");
            }
        } else {
            rec.delta_log_ma = std::log(ma_after) - std::log(ma_before);
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<Port> read_ports_csv(const std::filesystem::path& path, const PortsCsvOptions& opts,
                                 std::vector<std::string>* warnings) {
    const CsvTable t = read_csv(path);
    const std::size_t c_id = t.col("id");
    const std::size_t c_lon = t.col("lon");
    const std::size_t c_lat = t.col("lat");
    const std::size_t c_base = t.col("in_baseline");
    const std::size_t c_cf = t.col("in_counterfactual");
    const std::size_t c_obs = t.col_optional("observations");

    std::vector<Port> ports;
    for (const auto& row : t.rows) {
        if (c_obs != CsvTable::npos) {
            const long obs = parse_long(row[c_obs], path.string());
            if (obs < opts.min_observations) {
                if (warnings) {
                    warnings->push_back("port '" + row[c_id] + "' dropped: " +
                                        std::to_string(obs) + " observations < " +
                                        std::to_string(opts.min_observations));
                }
                continue;
            }
        }
        Port p;
        p.id = row[c_id];
        p.location = {parse_double(row[c_lon], path.string()),
                      parse_double(row[c_lat], path.string())};
        p.in_baseline = parse_long(row[c_base], path.string()) != 0;
        p.in_counterfactual = parse_long(row[c_cf], path.string()) != 0;
        if (p.in_baseline && !p.in_counterfactual) {
            throw DataError("ports csv: '" + p.id + "' in baseline but not counterfactual set");
        }
        ports.push_back(std::move(p));
    }
    return ports;
}

std::vector<ParishSite> read_parishes_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t c_id = t.col("id");
    const std::size_t c_lon = t.col("lon");
    const std::size_t c_lat = t.col("lat");
    const std::size_t c_region = t.col_optional("region");

    std::vector<ParishSite> parishes;
    for (const auto& row : t.rows) {
        ParishSite p;
        p.id = row[c_id];
        p.centroid = {parse_double(row[c_lon], path.string()),
                      parse_double(row[c_lat], path.string())};
        if (c_region != CsvTable::npos) p.region = region_from_name(row[c_region]);
        parishes.push_back(std::move(p));
    }
    return parishes;
}

void write_market_access_csv(const std::filesystem::path& path,
                             std::span<const MarketAccessRecord> records, double alpha,
                             const std::string& comment) {
    CsvWriter w(path, comment);
    w.write_row({"parish_id", "ma_before", "ma_after", "delta_log_ma", "theta", "alpha"});
    for (const auto& r : records) {
        w.write_row({r.parish_id, CsvWriter::fmt(r.ma_before), CsvWriter::fmt(r.ma_after),
                     CsvWriter::fmt(r.delta_log_ma), CsvWriter::fmt(r.theta),
                     CsvWriter::fmt(alpha)});
    }
}

} // namespace harbor::ma
