#include "harbor/geo/grid.hpp"

#include "harbor/util/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace harbor::geo {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

AsciiGrid read_ascii_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("ascii grid: cannot open " + path.string());

    AsciiGrid g;
    bool have_ncols = false, have_nrows = false, have_cell = false;
    bool have_x = false, have_y = false;

    // Header: key/value lines until the first numeric token.
    std::string key;
    while (in >> key) {
        const std::string k = lower(key);
        if (k == "ncols") {
            if (!(in >> g.ncols)) throw DataError("ascii grid: bad ncols");
            have_ncols = true;
        } else if (k == "nrows") {
            if (!(in >> g.nrows)) throw DataError("ascii grid: bad nrows");
            have_nrows = true;
        } else if (k == "xllcorner") {
            if (!(in >> g.xllcorner)) throw DataError("ascii grid: bad xllcorner");
            have_x = true;
        } else if (k == "yllcorner") {
            if (!(in >> g.yllcorner)) throw DataError("ascii grid: bad yllcorner");
            have_y = true;
        } else if (k == "cellsize") {
            if (!(in >> g.cellsize)) throw DataError("ascii grid: bad cellsize");
            have_cell = true;
        } else if (k == "nodata_value") {
            if (!(in >> g.nodata)) throw DataError("ascii grid: bad NODATA_value");
        } else {
            // First data token: push it back by parsing directly.
            break;
        }
        key.clear();
    }
    if (!have_ncols || !have_nrows || !have_cell || !have_x || !have_y) {
        throw DataError("ascii grid: malformed header in " + path.string());
    }
    if (g.ncols <= 0 || g.nrows <= 0 || g.cellsize <= 0.0) {
        throw DataError("ascii grid: non-positive dimensions in " + path.string());
    }

    const std::size_t n = static_cast<std::size_t>(g.ncols) * g.nrows;
    std::vector<double> file_order;
    file_order.reserve(n);
    if (!key.empty()) {
        try {
            file_order.push_back(std::stod(key));
        } catch (const std::exception&) {
            throw DataError("ascii grid: unexpected token '" + key + "' in " + path.string());
        }
    }
    double v;
    while (file_order.size() < n && in >> v) file_order.push_back(v);
    if (file_order.size() != n) {
        throw DataError("ascii grid: expected " + std::to_string(n) + " cells, got " +
                        std::to_string(file_order.size()) + " in " + path.string());
    }

    // File rows run north to south; store south-up.
    g.values.resize(n);
    for (int r = 0; r < g.nrows; ++r) {
        const int file_row = g.nrows - 1 - r;
        std::copy_n(file_order.begin() + static_cast<std::size_t>(file_row) * g.ncols, g.ncols,
                    g.values.begin() + static_cast<std::size_t>(r) * g.ncols);
    }
    return g;
}

void write_ascii_grid(const std::filesystem::path& path, const AsciiGrid& grid) {
    std::ofstream out(path);
    if (!out) throw DataError("ascii grid: cannot write " + path.string());
    out << "ncols " << grid.ncols << "\n";
    out << "nrows " << grid.nrows << "\n";
    out << "xllcorner " << grid.xllcorner << "\n";
    out << "yllcorner " << grid.yllcorner << "\n";
    out << "cellsize " << grid.cellsize << "\n";
    out << "NODATA_value " << grid.nodata << "\n";
    for (int r = grid.nrows - 1; r >= 0; --r) {
        for (int c = 0; c < grid.ncols; ++c) {
            if (c) out << ' ';
            out << grid.at(c, r);
        }
        out << '\n';
    }
}

CostSurface::CostSurface(int width, int height, double cell_size_km, Point origin, double alpha,
                         std::vector<CellClass> cells)
    : width_(width),
      height_(height),
      cell_size_km_(cell_size_km),
      coord_cellsize_(cell_size_km),
      origin_(origin),
      alpha_(alpha),
      cells_(std::move(cells)) {
    if (alpha_ <= 1.0) throw ConfigError("cost surface: alpha must exceed 1");
    if (width_ <= 0 || height_ <= 0 || cell_size_km_ <= 0.0) {
        throw ConfigError("cost surface: non-positive dimensions");
    }
    if (cells_.size() != static_cast<std::size_t>(width_) * height_) {
        throw ConfigError("cost surface: cell count mismatch");
    }
}

std::optional<CellCoord> CostSurface::snap(Point p) const {
    const double fx = (p.x - origin_.x) / coord_cellsize_;
    const double fy = (p.y - origin_.y) / coord_cellsize_;
    if (fx < 0.0 || fx > width_ || fy < 0.0 || fy > height_) return std::nullopt;
    CellCoord c{static_cast<int>(std::floor(fx)), static_cast<int>(std::floor(fy))};
    c.col = std::clamp(c.col, 0, width_ - 1);
    c.row = std::clamp(c.row, 0, height_ - 1);
    return c;
}

std::optional<CellCoord> CostSurface::nearest_navigable(CellCoord c, int radius) const {
    if (!in_bounds(c)) return std::nullopt;
    if (is_navigable(c)) return c;
    std::optional<CellCoord> best;
    int best_d2 = radius * radius + 1;
    for (int dr = -radius; dr <= radius; ++dr) {
        for (int dc = -radius; dc <= radius; ++dc) {
            const CellCoord q{c.col + dc, c.row + dr};
            const int d2 = dc * dc + dr * dr;
            if (d2 == 0 || d2 > radius * radius || !in_bounds(q) || !is_navigable(q)) continue;
            if (d2 < best_d2) {
                best_d2 = d2;
                best = q;
            }
        }
    }
    return best;
}

CostSurface build_cost_surface(const AsciiGrid& grid, double alpha,
                               std::span<const Polygon> forced_land_regions,
                               const CostSurfaceOptions& opts) {
    if (alpha <= 1.0) throw ConfigError("build_cost_surface: alpha must exceed 1");
    std::vector<CellClass> cells(grid.values.size());
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        const double v = grid.values[i];
        if (v == grid.nodata) {
            cells[i] = CellClass::Land;
        } else if (v == 0.0) {
            cells[i] = CellClass::Water;
        } else if (v == 1.0) {
            cells[i] = CellClass::Land;
        } else {
            throw DataError("build_cost_surface: raster cell value " + std::to_string(v) +
                            " is neither 0 (water) nor 1 (land)");
        }
    }

    CostSurface surface(grid.ncols, grid.nrows, grid.cellsize * opts.km_per_unit,
                        Point{grid.xllcorner, grid.yllcorner}, alpha, std::move(cells));
    surface.set_coord_cellsize(grid.cellsize);

    // Reprice water cells inside the forced-land polygons. Polygons fully
    // outside the raster are skipped with a warning.
    std::vector<CellClass> repriced(grid.values.size());
    for (std::size_t i = 0; i < repriced.size(); ++i) {
        repriced[i] = surface.cell(surface.coord(i));
    }
    const double x0 = grid.xllcorner;
    const double y0 = grid.yllcorner;
    const double x1 = x0 + grid.ncols * grid.cellsize;
    const double y1 = y0 + grid.nrows * grid.cellsize;
    for (std::size_t pi = 0; pi < forced_land_regions.size(); ++pi) {
        const Polygon& poly = forced_land_regions[pi];
        bool touches = false;
        for (const Point& p : poly.outer) {
            if (p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1) {
                touches = true;
                break;
            }
        }
        if (!touches) {
            if (opts.warnings) {
                opts.warnings->push_back("forced-land polygon " + std::to_string(pi) +
                                         " lies outside the raster extent; ignored");
            }
            continue;
        }
        for (int r = 0; r < grid.nrows; ++r) {
            for (int c = 0; c < grid.ncols; ++c) {
                const CellCoord cc{c, r};
                if (surface.cell(cc) != CellClass::Water) continue;
                if (point_in_polygon(surface.cell_center(cc), poly)) {
                    repriced[surface.index(cc)] = CellClass::ForcedLand;
                }
            }
        }
    }

    CostSurface out(grid.ncols, grid.nrows, grid.cellsize * opts.km_per_unit,
                    Point{grid.xllcorner, grid.yllcorner}, alpha, std::move(repriced));
    out.set_coord_cellsize(grid.cellsize);
    return out;
}

CostSurface build_cost_surface(const std::filesystem::path& raster_file, double alpha,
                               std::span<const Polygon> forced_land_regions,
                               const CostSurfaceOptions& opts) {
    return build_cost_surface(read_ascii_grid(raster_file), alpha, forced_land_regions, opts);
}

} // namespace harbor::geo
