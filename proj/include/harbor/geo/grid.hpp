#ifndef HARBOR_GEO_GRID_HPP
#define HARBOR_GEO_GRID_HPP

#include "harbor/geo/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace harbor::geo {

/// Raw ESRI ASCII grid. Values are stored row 0 = southernmost row
/// (file order is north-first and gets flipped on read).
struct AsciiGrid {
    int ncols = 0;
    int nrows = 0;
    double xllcorner = 0.0;
    double yllcorner = 0.0;
    double cellsize = 1.0;
    double nodata = -9999.0;
    std::vector<double> values;

    double at(int col, int row) const { return values[static_cast<std::size_t>(row) * ncols + col]; }
    double& at(int col, int row) { return values[static_cast<std::size_t>(row) * ncols + col]; }
};

AsciiGrid read_ascii_grid(const std::filesystem::path& path);
void write_ascii_grid(const std::filesystem::path& path, const AsciiGrid& grid);

enum class CellClass : std::uint8_t {
    Water = 0,
    Land = 1,
    /// Hydrologically water but priced as land (shallow-water reload zones).
    ForcedLand = 2,
};

struct CellCoord {
    int col = 0;
    int row = 0;
    bool operator==(const CellCoord&) const = default;
};

/// Immutable traversal-cost raster. Water cells cost 1 per km travelled,
/// land and forced-land cells cost alpha per km. Distances everywhere in
/// the project are therefore expressed in water-kilometres.
class CostSurface {
public:
    CostSurface(int width, int height, double cell_size_km, Point origin, double alpha,
                std::vector<CellClass> cells);

    int width() const { return width_; }
    int height() const { return height_; }
    double cell_size() const { return cell_size_km_; }
    double alpha() const { return alpha_; }
    Point origin() const { return origin_; }
    /// Planar CRS units per cell edge, used to map point coordinates to cells.
    double coord_cellsize() const { return coord_cellsize_; }
    void set_coord_cellsize(double v) { coord_cellsize_ = v; }

    bool in_bounds(CellCoord c) const {
        return c.col >= 0 && c.col < width_ && c.row >= 0 && c.row < height_;
    }
    CellClass cell(CellCoord c) const {
        return cells_[static_cast<std::size_t>(c.row) * width_ + c.col];
    }
    double unit_cost(CellCoord c) const {
        return cell(c) == CellClass::Water ? 1.0 : alpha_;
    }
    bool is_navigable(CellCoord c) const { return cell(c) != CellClass::Land; }

    Point cell_center(CellCoord c) const {
        return {origin_.x + (c.col + 0.5) * coord_cellsize_,
                origin_.y + (c.row + 0.5) * coord_cellsize_};
    }
    /// Nearest cell centre; nullopt when the point lies outside the extent.
    std::optional<CellCoord> snap(Point p) const;
    /// Nearest navigable (water or forced-land) cell within `radius` cells of
    /// c, squared-Euclidean metric with row-major tie-breaking; nullopt if none.
    std::optional<CellCoord> nearest_navigable(CellCoord c, int radius = 5) const;

    std::size_t index(CellCoord c) const {
        return static_cast<std::size_t>(c.row) * width_ + c.col;
    }
    CellCoord coord(std::size_t index) const {
        return {static_cast<int>(index % width_), static_cast<int>(index / width_)};
    }

private:
    int width_;
    int height_;
    double cell_size_km_;
    double coord_cellsize_;
    Point origin_;
    double alpha_;
    std::vector<CellClass> cells_;
};

struct CostSurfaceOptions {
    /// Kilometres per raster CRS unit; cell_size_km = cellsize * km_per_unit.
    double km_per_unit = 1.0;
    /// Sink for non-fatal notices (out-of-bounds polygons etc.).
    std::vector<std::string>* warnings = nullptr;
};

/// Reads a {0 = water, 1 = land} raster and applies forced-land polygons.
/// Water cells whose centre falls inside any polygon become ForcedLand.
/// NODATA cells are treated as land.
CostSurface build_cost_surface(const std::filesystem::path& raster_file, double alpha,
                               std::span<const Polygon> forced_land_regions,
                               const CostSurfaceOptions& opts = {});

/// Same, from an in-memory grid (used by the synthetic world and tests).
CostSurface build_cost_surface(const AsciiGrid& grid, double alpha,
                               std::span<const Polygon> forced_land_regions,
                               const CostSurfaceOptions& opts = {});

} // namespace harbor::geo

#endif
