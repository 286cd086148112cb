#ifndef HARBOR_GEO_COST_DISTANCE_HPP
#define HARBOR_GEO_COST_DISTANCE_HPP

#include "harbor/geo/grid.hpp"

#include <filesystem>
#include <limits>
#include <span>
#include <vector>

namespace harbor::geo {

/// Single-source least-cost distances over the 8-connected grid, in
/// water-kilometres. Unreachable cells hold +infinity.
struct CostDistanceField {
    CellCoord source;
    int width = 0;
    int height = 0;
    std::vector<double> distances;

    static constexpr double kUnreachable = std::numeric_limits<double>::infinity();

    double at(CellCoord c) const {
        return distances[static_cast<std::size_t>(c.row) * width + c.col];
    }
    bool reachable(CellCoord c) const { return at(c) != kUnreachable; }
};

/// Dijkstra from `source`. The step between adjacent cells a,b costs
/// step_length x min(unit_cost(a), unit_cost(b)) where step_length is
/// cell_size for orthogonal moves and cell_size * sqrt(2) for diagonal ones.
CostDistanceField cost_distance(const CostSurface& surface, CellCoord source);

/// One field per source, computed in parallel (surface is shared read-only).
std::vector<CostDistanceField> cost_distance_multi(const CostSurface& surface,
                                                   std::span<const CellCoord> sources,
                                                   unsigned threads = 1);

/// Costs from a geographic source point to each target point. Points snap to
/// the nearest cell centre; a source snapping onto land is relocated to the
/// nearest navigable cell within 5 cells, else every cost is unreachable.
/// Targets outside the extent raise DataError; unreachable targets yield
/// +infinity.
std::vector<double> cost_distance_to_points(const CostSurface& surface, Point source,
                                            std::span<const Point> targets);

/// col,row,distance rows; unreachable cells serialize as "inf".
void write_distance_csv(const std::filesystem::path& path, const CostDistanceField& field,
                        const std::string& comment);

} // namespace harbor::geo

#endif
