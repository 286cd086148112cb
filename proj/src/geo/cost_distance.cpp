#include "harbor/geo/cost_distance.hpp"

#include "harbor/util/csv.hpp"
#include "harbor/util/errors.hpp"
#include "harbor/util/parallel.hpp"

#include <cmath>
#include <queue>

namespace harbor::geo {

CostDistanceField cost_distance(const CostSurface& surface, CellCoord source) {
    if (!surface.in_bounds(source)) {
        throw DataError("cost_distance: source cell (" + std::to_string(source.col) + "," +
                        std::to_string(source.row) + ") out of bounds");
    }
    const int w = surface.width();
    const int h = surface.height();
    CostDistanceField field;
    field.source = source;
    field.width = w;
    field.height = h;
    field.distances.assign(static_cast<std::size_t>(w) * h, CostDistanceField::kUnreachable);

    const double step = surface.cell_size();
    const double diag = step * M_SQRT2;

    using Entry = std::pair<double, std::size_t>; // (distance, cell index)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    const std::size_t s = surface.index(source);
    field.distances[s] = 0.0;
    heap.emplace(0.0, s);

    static constexpr int kDc[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int kDr[8] = {0, 0, 1, -1, 1, -1, 1, -1};

    while (!heap.empty()) {
        const auto [d, idx] = heap.top();
        heap.pop();
        if (d > field.distances[idx]) continue;
        const CellCoord c = surface.coord(idx);
        const double uc = surface.unit_cost(c);
        for (int k = 0; k < 8; ++k) {
            const CellCoord nb{c.col + kDc[k], c.row + kDr[k]};
            if (!surface.in_bounds(nb)) continue;
            const double len = (k < 4) ? step : diag;
            const double edge = len * std::min(uc, surface.unit_cost(nb));
            const double nd = d + edge;
            const std::size_t ni = surface.index(nb);
            if (nd < field.distances[ni]) {
                field.distances[ni] = nd;
                heap.emplace(nd, ni);
            }
        }
    }
    return field;
}

std::vector<CostDistanceField> cost_distance_multi(const CostSurface& surface,
                                                   std::span<const CellCoord> sources,
                                                   unsigned threads) {
    std::vector<CostDistanceField> fields(sources.size());
    parallel_for(sources.size(), threads,
                 [&](std::size_t i) { fields[i] = cost_distance(surface, sources[i]); });
    return fields;
}

std::vector<double> cost_distance_to_points(const CostSurface& surface, Point source,
                                            std::span<const Point> targets) {
    const auto src_cell = surface.snap(source);
    if (!src_cell) throw DataError("cost_distance_to_points: source outside raster extent");

    std::vector<CellCoord> target_cells;
    target_cells.reserve(targets.size());
    for (const Point& t : targets) {
        const auto cell = surface.snap(t);
        if (!cell) throw DataError("cost_distance_to_points: target outside raster extent");
        target_cells.push_back(*cell);
    }

    // A source on plain land is relocated to the nearest navigable cell; if
    // none exists within the search radius every target is unreachable.
    CellCoord start = *src_cell;
    if (surface.cell(start) == CellClass::Land) {
        const auto moved = surface.nearest_navigable(start);
        if (!moved) {
            return std::vector<double>(targets.size(), CostDistanceField::kUnreachable);
        }
        start = *moved;
    }

    const CostDistanceField field = cost_distance(surface, start);
    std::vector<double> out;
    out.reserve(targets.size());
    for (const CellCoord& t : target_cells) out.push_back(field.at(t));
    return out;
}

void write_distance_csv(const std::filesystem::path& path, const CostDistanceField& field,
                        const std::string& comment) {
    CsvWriter w(path, comment);
    w.write_row({"col", "row", "distance"});
    for (int r = 0; r < field.height; ++r) {
        for (int c = 0; c < field.width; ++c) {
            const double d = field.at({c, r});
            w.write_row({std::to_string(c), std::to_string(r),
                         std::isinf(d) ? "inf" : CsvWriter::fmt(d)});
        }
    }
}

} // namespace harbor::geo
