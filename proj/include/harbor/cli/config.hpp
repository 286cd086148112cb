#ifndef HARBOR_CLI_CONFIG_HPP
#define HARBOR_CLI_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace harbor::cli {

/// Everything a pipeline run needs. Loaded from a sectioned key=value file;
/// command-line flags override file values.
struct RunConfig {
    // paths
    std::filesystem::path raster;
    std::filesystem::path raster_closed; // optional counterfactual surface
    std::filesystem::path parishes;
    std::filesystem::path ports;
    std::filesystem::path port_locations;
    std::filesystem::path census;
    std::filesystem::path counties;
    std::filesystem::path sound_toll;
    std::filesystem::path findings;
    std::filesystem::path parish_polygons;
    std::filesystem::path soil;
    std::filesystem::path forced_land;
    std::filesystem::path fjord;
    std::filesystem::path coast;
    std::filesystem::path out_dir = "out";

    // parameters
    double alpha = 10.0;
    double theta = -1.0;
    std::vector<double> theta_grid = {-1.0, -2.0, -4.0, -8.0, -16.0};
    std::vector<double> alpha_grid = {5.0, 10.0, 20.0, 50.0};
    int replicates = 1000; // Monte Carlo samples B
    int n_boot = 200;
    std::uint64_t seed = 0;
    bool seed_set = false; // seed is mandatory
    double prior_c = 1.0;
    int window = 25;
    int reference_year = 1801;
    int arch_reference_year = 1000;
    std::vector<int> census_years = {1787, 1801, 1834, 1840, 1845, 1850, 1860, 1880, 1901};
    double km_per_unit = 1.0;
    unsigned threads = 1;
    long min_port_observations = 2;
    double copenhagen_radius_km = 30.0;
    double copenhagen_x = 12.568; // used by the excl-capital subgroup
    double copenhagen_y = 55.676;

    // toggles
    bool exclude_1807_1814 = false;
    bool exclude_1825_1833 = false;
    std::string dating_model = "uniform";
    std::string control_subgroup = "all";
    bool multiverse = false;
    bool emit_plots = false;

    /// FNV-1a over the normalized key=value serialization; stamped into
    /// every output file so identical configs are recognizable.
    std::uint64_t hash() const;
    std::string provenance() const; // "config=<hex> seed=<n>"

    /// Throws ConfigError when mandatory values are missing or referenced
    /// files do not exist.
    void validate(bool need_seed = true) const;

    std::map<std::string, std::string> serialize() const;
};

RunConfig load_config(const std::filesystem::path& file);
/// key=value override (flags win over file values).
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

} // namespace harbor::cli

#endif
