#include "harbor/geo/geometry.hpp"

#include "harbor/util/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace harbor::geo {

namespace {

using nlohmann::json;

Point parse_position(const json& pos) {
    if (!pos.is_array() || pos.size() < 2) throw DataError("geojson: bad position");
    return {pos[0].get<double>(), pos[1].get<double>()};
}

Ring parse_ring(const json& coords) {
    Ring ring;
    for (const auto& p : coords) ring.push_back(parse_position(p));
    return ring;
}

void add_ring_segments(const Ring& ring, Geometry& out) {
    if (ring.size() < 2) {
        if (ring.size() == 1) out.points.push_back(ring[0]);
        return;
    }
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        out.segments.emplace_back(ring[i], ring[i + 1]);
    }
}

void collect_geometry(const json& g, Geometry& out,
                      std::vector<Polygon>* polygons) {
    const std::string type = g.at("type").get<std::string>();
    if (type == "Point") {
        out.points.push_back(parse_position(g.at("coordinates")));
    } else if (type == "MultiPoint") {
        for (const auto& p : g.at("coordinates")) out.points.push_back(parse_position(p));
    } else if (type == "LineString") {
        add_ring_segments(parse_ring(g.at("coordinates")), out);
    } else if (type == "MultiLineString") {
        for (const auto& line : g.at("coordinates")) add_ring_segments(parse_ring(line), out);
    } else if (type == "Polygon") {
        Polygon poly;
        const auto& rings = g.at("coordinates");
        for (std::size_t i = 0; i < rings.size(); ++i) {
            Ring r = parse_ring(rings[i]);
            add_ring_segments(r, out);
            if (i == 0) poly.outer = std::move(r);
            else poly.holes.push_back(std::move(r));
        }
        if (polygons) polygons->push_back(std::move(poly));
    } else if (type == "MultiPolygon") {
        for (const auto& rings : g.at("coordinates")) {
            Polygon poly;
            for (std::size_t i = 0; i < rings.size(); ++i) {
                Ring r = parse_ring(rings[i]);
                add_ring_segments(r, out);
                if (i == 0) poly.outer = std::move(r);
                else poly.holes.push_back(std::move(r));
            }
            if (polygons) polygons->push_back(std::move(poly));
        }
    } else if (type == "GeometryCollection") {
        for (const auto& sub : g.at("geometries")) collect_geometry(sub, out, polygons);
    } else {
        throw DataError("geojson: unsupported geometry type '" + type + "'");
    }
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("geojson: cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("geojson: parse failure in " + path.string() + ": " + e.what());
    }
    return j;
}

std::string feature_id(const json& feature, std::size_t index) {
    if (feature.contains("id")) {
        const auto& id = feature["id"];
        if (id.is_string()) return id.get<std::string>();
        if (id.is_number_integer()) return std::to_string(id.get<long long>());
    }
    if (feature.contains("properties") && feature["properties"].is_object()) {
        const auto& props = feature["properties"];
        for (const char* key : {"id", "name", "parish_id"}) {
            if (props.contains(key)) {
                const auto& v = props[key];
                if (v.is_string()) return v.get<std::string>();
                if (v.is_number_integer()) return std::to_string(v.get<long long>());
            }
        }
    }
    return "feature_" + std::to_string(index);
}

} // namespace

bool point_in_ring(Point p, const Ring& ring) {
    // Even-odd ray cast toward +x.
    bool inside = false;
    const std::size_t n = ring.size();
    if (n < 3) return false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = ring[i];
        const Point& b = ring[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

bool point_in_polygon(Point p, const Polygon& poly) {
    if (!point_in_ring(p, poly.outer)) return false;
    for (const Ring& hole : poly.holes) {
        if (point_in_ring(p, hole)) return false;
    }
    return true;
}

double distance_to_segment(Point p, Point a, Point b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
        t = std::clamp(t, 0.0, 1.0);
    }
    const double cx = a.x + t * dx;
    const double cy = a.y + t * dy;
    return std::hypot(p.x - cx, p.y - cy);
}

double Geometry::distance_to(Point p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const Point& q : points) {
        best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
    }
    for (const auto& [a, b] : segments) {
        best = std::min(best, distance_to_segment(p, a, b));
    }
    return best;
}

Geometry read_geojson_geometry(const std::filesystem::path& path) {
    const json j = load_json(path);
    Geometry out;
    const std::string type = j.at("type").get<std::string>();
    if (type == "FeatureCollection") {
        for (const auto& f : j.at("features")) collect_geometry(f.at("geometry"), out, nullptr);
    } else if (type == "Feature") {
        collect_geometry(j.at("geometry"), out, nullptr);
    } else {
        collect_geometry(j, out, nullptr);
    }
    return out;
}

std::vector<std::pair<std::string, Polygon>> read_geojson_polygons(
    const std::filesystem::path& path) {
    const json j = load_json(path);
    std::vector<std::pair<std::string, Polygon>> out;
    const std::string type = j.at("type").get<std::string>();
    auto take = [&out](const json& g, const std::string& id) {
        Geometry scratch;
        std::vector<Polygon> polys;
        collect_geometry(g, scratch, &polys);
        for (std::size_t k = 0; k < polys.size(); ++k) {
            const std::string pid = polys.size() == 1 ? id : id + "_" + std::to_string(k);
            out.emplace_back(pid, std::move(polys[k]));
        }
    };
    if (type == "FeatureCollection") {
        const auto& features = j.at("features");
        for (std::size_t i = 0; i < features.size(); ++i) {
            take(features[i].at("geometry"), feature_id(features[i], i));
        }
    } else if (type == "Feature") {
        take(j.at("geometry"), feature_id(j, 0));
    } else {
        take(j, "feature_0");
    }
    return out;
}

} // namespace harbor::geo
