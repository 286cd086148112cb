#ifndef HARBOR_TESTS_FIXTURES_HPP
#define HARBOR_TESTS_FIXTURES_HPP

#include "harbor/geo/grid.hpp"
#include "harbor/util/rng.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fixtures {

/// Surface from an explicit cell layout, row 0 = south.
inline harbor::geo::CostSurface make_surface(int width, int height,
                                             const std::vector<int>& cells, double alpha = 10.0,
                                             double cell_size = 1.0) {
    std::vector<harbor::geo::CellClass> classes(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        classes[i] = cells[i] == 0 ? harbor::geo::CellClass::Water
                                   : (cells[i] == 2 ? harbor::geo::CellClass::ForcedLand
                                                    : harbor::geo::CellClass::Land);
    }
    return harbor::geo::CostSurface(width, height, cell_size, {0.0, 0.0}, alpha,
                                    std::move(classes));
}

/// Random mixed land/water grid; guarantees at least one water cell.
inline harbor::geo::CostSurface random_surface(int width, int height, std::uint64_t seed,
                                               double land_share = 0.35, double alpha = 10.0) {
    harbor::Rng rng(seed);
    std::vector<int> cells(static_cast<std::size_t>(width) * height);
    for (auto& c : cells) c = rng.next_unit() < land_share ? 1 : 0;
    cells[0] = 0;
    return make_surface(width, height, cells, alpha);
}

inline bool near_abs(double a, double b, double tol) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::fabs(a - b) <= tol;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("harbor_tests_" + name);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& path,
                                        const std::string& content) {
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace fixtures

#endif
