#ifndef HARBOR_MA_REGIONS_HPP
#define HARBOR_MA_REGIONS_HPP

#include "harbor/geo/geometry.hpp"
#include "harbor/ma/market_access.hpp"

namespace harbor::ma {

/// Parameters of the west/middle/east partition. The divider endpoints
/// default to the Logstor line; they are expressed in the same planar
/// coordinates as parish centroids.
struct RegionClassifier {
    geo::Geometry fjord;  // the inland waterway
    geo::Geometry coast;  // the open coast
    geo::Point divider_a{9.186837, 57.044185};
    geo::Point divider_b{9.275585, 56.958951};
    double buffer_km = 20.0;
    /// Kilometres per planar coordinate unit (1.0 when coordinates are km).
    double km_per_unit = 1.0;

    Region classify(geo::Point centroid) const;
};

/// A parish belongs to the waterway iff its centroid is nearer the fjord
/// than the open coast. Waterway parishes within buffer_km of the divider
/// segment are Middle; otherwise the side of the divider line decides
/// West/East. Everything else is Reference.
Region classify_region(geo::Point centroid, const geo::Geometry& fjord,
                       const geo::Geometry& coast, geo::Point divider_a, geo::Point divider_b,
                       double buffer_km = 20.0, double km_per_unit = 1.0);

} // namespace harbor::ma

#endif
