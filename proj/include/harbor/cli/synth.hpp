#ifndef HARBOR_CLI_SYNTH_HPP
#define HARBOR_CLI_SYNTH_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace harbor::cli {

/// Scale and truth parameters of the generated world.
struct SynthParams {
    std::uint64_t seed = 42;
    int n_parishes = 200;
    int n_treated = 40;
    /// Injected census event-study coefficients (dummy treatment); years
    /// absent from the map are zero.
    std::map<int, double> census_beta = {{1901, 0.25}};
    double noise_sigma = 0.05;
    double base_log_population = 4.6;
    /// Injected trade jumps after 1834 (log points).
    double trade_post_west = 4.0;
    double trade_post_middle = 5.0;
    double trade_post_east = 0.0;
    int findings_per_parish = 2;
    /// Treated findings are dated at most this late (activity "stops").
    int treated_finding_last_year = 1100;
};

/// Everything the generator wrote, plus the standing ground truth.
struct SyntheticWorld {
    std::filesystem::path dir;
    std::filesystem::path raster_open;
    std::filesystem::path raster_closed;
    std::filesystem::path parishes;
    std::filesystem::path parish_polygons;
    std::filesystem::path ports;
    std::filesystem::path port_locations;
    std::filesystem::path census;
    std::filesystem::path counties;
    std::filesystem::path sound_toll;
    std::filesystem::path findings;
    std::filesystem::path soil;
    std::filesystem::path fjord;
    std::filesystem::path coast;
    std::filesystem::path ground_truth;
    std::filesystem::path config_file;
    std::vector<std::string> treated_ids;
};

/// Coastline-with-a-channel world: an open sea, a barrier pierced by a
/// channel strip, a lagoon with new ports behind it, and parishes on both
/// sides. Census, trade, findings and soil data are simulated from known
/// parameters which are written to ground_truth.json alongside the inputs.
SyntheticWorld generate_synthetic_world(const SynthParams& params,
                                        const std::filesystem::path& out_dir);

} // namespace harbor::cli

#endif
