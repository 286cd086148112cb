#ifndef HARBOR_MA_MARKET_ACCESS_HPP
#define HARBOR_MA_MARKET_ACCESS_HPP

#include "harbor/geo/cost_distance.hpp"
#include "harbor/geo/grid.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace harbor::ma {

enum class Region { West, Middle, East, Reference };

std::string region_name(Region r);
Region region_from_name(const std::string& name);

struct Port {
    std::string id;
    geo::Point location;
    bool in_baseline = false;       // member of H
    bool in_counterfactual = false; // member of H*
};

struct ParishSite {
    std::string id;
    geo::Point centroid;
    Region region = Region::Reference;
};

struct MarketAccessRecord {
    std::string parish_id;
    double ma_before = 0.0;   // MA under H
    double ma_after = 0.0;    // MA under H*
    double delta_log_ma = 0.0;
    double theta = -1.0;
    bool unreachable = false; // MA(H) = 0: no baseline port reachable
};

/// MA = sum over ports of (cost + 1)^theta. Unreachable ports (infinite
/// cost) contribute nothing. theta must be negative.
double market_access_from_costs(std::span<const double> costs, double theta);

/// Spec-level operation: MA of one parish against an explicit port subset.
/// Runs one Dijkstra from the parish centroid.
double market_access(const ParishSite& parish, std::span<const Port> ports, double theta,
                     const geo::CostSurface& surface);

/// MA under H and H* plus the treatment variable Delta log MA for one parish.
MarketAccessRecord delta_log_ma(const ParishSite& parish, std::span<const Port> ports,
                                double theta, const geo::CostSurface& surface);

/// Batch driver: one Dijkstra per distinct port cell (parallel), reused
/// across parishes. Port points landing on plain land are relocated to the
/// nearest navigable cell within 5 cells; ports that cannot be placed count
/// as unreachable everywhere.
std::vector<MarketAccessRecord> compute_market_access(std::span<const ParishSite> parishes,
                                                      std::span<const Port> ports, double theta,
                                                      const geo::CostSurface& surface,
                                                      unsigned threads = 1,
                                                      std::vector<std::string>* warnings = nullptr);

struct PortsCsvOptions {
    /// Ports with an "observations" column below this count are dropped
    /// (Sound Toll eligibility: seen more than once).
    long min_observations = 2;
};

std::vector<Port> read_ports_csv(const std::filesystem::path& path,
                                 const PortsCsvOptions& opts = {},
                                 std::vector<std::string>* warnings = nullptr);
std::vector<ParishSite> read_parishes_csv(const std::filesystem::path& path);
void write_market_access_csv(const std::filesystem::path& path,
                             std::span<const MarketAccessRecord> records, double alpha,
                             const std::string& comment);

} // namespace harbor::ma

#endif
