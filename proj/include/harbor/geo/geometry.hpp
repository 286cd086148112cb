#ifndef HARBOR_GEO_GEOMETRY_HPP
#define HARBOR_GEO_GEOMETRY_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace harbor::geo {

/// Planar point. Coordinates live in the raster CRS (for geographic inputs
/// this is lon/lat treated as planar; see README on units).
struct Point {
    double x = 0.0;
    double y = 0.0;
};

using Ring = std::vector<Point>;

/// Polygon with optional holes. Containment uses even-odd ray casting, so a
/// point inside a hole counts as outside.
struct Polygon {
    Ring outer;
    std::vector<Ring> holes;
};

bool point_in_ring(Point p, const Ring& ring);
bool point_in_polygon(Point p, const Polygon& poly);

/// Euclidean distance from p to segment [a, b].
double distance_to_segment(Point p, Point a, Point b);

/// A geometry reduced to primitives usable for distance queries:
/// isolated points and line segments (polygon boundaries are decomposed
/// into segments).
struct Geometry {
    std::vector<Point> points;
    std::vector<std::pair<Point, Point>> segments;

    bool empty() const { return points.empty() && segments.empty(); }
    /// Min distance from p to any primitive; +inf when empty.
    double distance_to(Point p) const;
};

/// Parses any GeoJSON geometry / Feature / FeatureCollection into distance
/// primitives.
Geometry read_geojson_geometry(const std::filesystem::path& path);

/// Polygons from a GeoJSON file. Feature ids come from the "id" member or an
/// "id"/"name" property; bare geometries get sequential ids.
std::vector<std::pair<std::string, Polygon>> read_geojson_polygons(
    const std::filesystem::path& path);

} // namespace harbor::geo

#endif
