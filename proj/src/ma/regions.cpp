#include "harbor/ma/regions.hpp"

#include "harbor/util/errors.hpp"

#include <cmath>
#include <limits>

namespace harbor::ma {

Region classify_region(geo::Point centroid, const geo::Geometry& fjord,
                       const geo::Geometry& coast, geo::Point divider_a, geo::Point divider_b,
                       double buffer_km, double km_per_unit) {
    const double dx = divider_b.x - divider_a.x;
    const double dy = divider_b.y - divider_a.y;
    if (dx == 0.0 && dy == 0.0) {
        throw ConfigError("classify_region: degenerate divider (identical endpoints)");
    }
    if (fjord.empty()) throw ConfigError("classify_region: empty fjord geometry");

    // Nearer the open coast than the fjord -> plain reference parish.
    const double d_fjord = fjord.distance_to(centroid);
    const double d_coast = coast.empty() ? std::numeric_limits<double>::infinity()
                                         : coast.distance_to(centroid);
    if (d_fjord >= d_coast) return Region::Reference;

    const double d_divider_km =
        geo::distance_to_segment(centroid, divider_a, divider_b) * km_per_unit;
    if (d_divider_km < buffer_km) return Region::Middle;

    // Side of the infinite divider line: project the centroid onto the line
    // and compare x; west means lying at smaller x than the projection.
    const double len2 = dx * dx + dy * dy;
    const double t = ((centroid.x - divider_a.x) * dx + (centroid.y - divider_a.y) * dy) / len2;
    const double proj_x = divider_a.x + t * dx;
    return centroid.x < proj_x ? Region::West : Region::East;
}

Region RegionClassifier::classify(geo::Point centroid) const {
    return classify_region(centroid, fjord, coast, divider_a, divider_b, buffer_km, km_per_unit);
}

} // namespace harbor::ma
