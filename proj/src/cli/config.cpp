#include "harbor/cli/config.hpp"

#include "harbor/util/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace harbor::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config: bad boolean '" + v + "' for " + key);
}

template <class T>
std::vector<T> parse_list(const std::string& v, const std::string& key) {
    std::vector<T> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            if constexpr (std::is_same_v<T, int>) out.push_back(std::stoi(item));
            else out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config: bad list item '" + item + "' for " + key);
        }
    }
    if (out.empty()) throw ConfigError("config: empty list for " + key);
    return out;
}

template <class T>
std::string join_list(const std::vector<T>& xs) {
    std::ostringstream out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out << ',';
        out << xs[i];
    }
    return out.str();
}

} // namespace

void apply_override(RunConfig& c, const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "raster") c.raster = value;
    else if (key == "raster_closed") c.raster_closed = value;
    else if (key == "parishes") c.parishes = value;
    else if (key == "ports") c.ports = value;
    else if (key == "port_locations") c.port_locations = value;
    else if (key == "census") c.census = value;
    else if (key == "counties") c.counties = value;
    else if (key == "sound_toll") c.sound_toll = value;
    else if (key == "findings") c.findings = value;
    else if (key == "parish_polygons") c.parish_polygons = value;
    else if (key == "soil") c.soil = value;
    else if (key == "forced_land") c.forced_land = value;
    else if (key == "fjord") c.fjord = value;
    else if (key == "coast") c.coast = value;
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "alpha") c.alpha = std::stod(value);
    else if (key == "theta") c.theta = std::stod(value);
    else if (key == "theta_grid") c.theta_grid = parse_list<double>(value, key);
    else if (key == "alpha_grid") c.alpha_grid = parse_list<double>(value, key);
    else if (key == "replicates") c.replicates = std::stoi(value);
    else if (key == "n_boot") c.n_boot = std::stoi(value);
    else if (key == "seed") {
        c.seed = std::stoull(value);
        c.seed_set = true;
    } else if (key == "prior_c") c.prior_c = std::stod(value);
    else if (key == "window") c.window = std::stoi(value);
    else if (key == "reference_year") c.reference_year = std::stoi(value);
    else if (key == "arch_reference_year") c.arch_reference_year = std::stoi(value);
    else if (key == "census_years") c.census_years = parse_list<int>(value, key);
    else if (key == "km_per_unit") c.km_per_unit = std::stod(value);
    else if (key == "threads") c.threads = static_cast<unsigned>(std::stoul(value));
    else if (key == "min_port_observations") c.min_port_observations = std::stol(value);
    else if (key == "copenhagen_radius_km") c.copenhagen_radius_km = std::stod(value);
    else if (key == "copenhagen_x") c.copenhagen_x = std::stod(value);
    else if (key == "copenhagen_y") c.copenhagen_y = std::stod(value);
    else if (key == "exclude_1807_1814") c.exclude_1807_1814 = parse_bool(value, key);
    else if (key == "exclude_1825_1833") c.exclude_1825_1833 = parse_bool(value, key);
    else if (key == "dating_model") c.dating_model = value;
    else if (key == "control_subgroup") c.control_subgroup = value;
    else if (key == "multiverse") c.multiverse = parse_bool(value, key);
    else if (key == "emit_plots") c.emit_plots = parse_bool(value, key);
    else throw ConfigError("config: unknown key '" + key + "'");
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("config: cannot open " + file.string());
    RunConfig config;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') continue; // sections are cosmetic
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: expected key=value at " + file.string() + ":" +
                              std::to_string(lineno));
        }
        try {
            apply_override(config, trim(t.substr(0, eq)), t.substr(eq + 1));
        } catch (const std::invalid_argument&) {
            throw ConfigError("config: bad value at " + file.string() + ":" +
                              std::to_string(lineno));
        }
    }
    return config;
}

std::map<std::string, std::string> RunConfig::serialize() const {
    std::map<std::string, std::string> kv;
    kv["raster"] = raster.string();
    kv["raster_closed"] = raster_closed.string();
    kv["parishes"] = parishes.string();
    kv["ports"] = ports.string();
    kv["port_locations"] = port_locations.string();
    kv["census"] = census.string();
    kv["counties"] = counties.string();
    kv["sound_toll"] = sound_toll.string();
    kv["findings"] = findings.string();
    kv["parish_polygons"] = parish_polygons.string();
    kv["soil"] = soil.string();
    kv["forced_land"] = forced_land.string();
    kv["fjord"] = fjord.string();
    kv["coast"] = coast.string();
    kv["alpha"] = std::to_string(alpha);
    kv["theta"] = std::to_string(theta);
    kv["theta_grid"] = join_list(theta_grid);
    kv["alpha_grid"] = join_list(alpha_grid);
    kv["replicates"] = std::to_string(replicates);
    kv["n_boot"] = std::to_string(n_boot);
    kv["seed"] = std::to_string(seed);
    kv["prior_c"] = std::to_string(prior_c);
    kv["window"] = std::to_string(window);
    kv["reference_year"] = std::to_string(reference_year);
    kv["arch_reference_year"] = std::to_string(arch_reference_year);
    kv["census_years"] = join_list(census_years);
    kv["km_per_unit"] = std::to_string(km_per_unit);
    kv["min_port_observations"] = std::to_string(min_port_observations);
    kv["copenhagen_radius_km"] = std::to_string(copenhagen_radius_km);
    kv["copenhagen_x"] = std::to_string(copenhagen_x);
    kv["copenhagen_y"] = std::to_string(copenhagen_y);
    kv["exclude_1807_1814"] = exclude_1807_1814 ? "true" : "false";
    kv["exclude_1825_1833"] = exclude_1825_1833 ? "true" : "false";
    kv["dating_model"] = dating_model;
    kv["control_subgroup"] = control_subgroup;
    kv["multiverse"] = multiverse ? "true" : "false";
    return kv;
}

std::uint64_t RunConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [k, v] : serialize()) {
        mix(k);
        mix("=");
        mix(v);
        mix("\n");
    }
    return h;
}

std::string RunConfig::provenance() const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "config=%016llx seed=%llu",
                  static_cast<unsigned long long>(hash()),
                  static_cast<unsigned long long>(seed));
    return buf;
}

void RunConfig::validate(bool need_seed) const {
    if (need_seed && !seed_set) throw ConfigError("config: seed is mandatory");
    if (alpha <= 1.0) throw ConfigError("config: alpha must exceed 1");
    if (theta >= 0.0) throw ConfigError("config: theta must be negative");
    if (theta_grid.empty() || alpha_grid.empty() || census_years.empty()) {
        throw ConfigError("config: grids must be nonempty");
    }
    if (prior_c <= 0.0 || prior_c > 1.0) throw ConfigError("config: prior_c must be in (0,1]");
    if (replicates < 1) throw ConfigError("config: replicates must be >= 1");
    if (n_boot < 2) throw ConfigError("config: n_boot must be >= 2");
    if (dating_model != "uniform" && dating_model != "normal") {
        throw ConfigError("config: dating_model must be uniform or normal");
    }
    for (const auto* p :
         {&raster, &raster_closed, &parishes, &ports, &port_locations, &census, &counties,
          &sound_toll, &findings, &parish_polygons, &soil, &forced_land, &fjord, &coast}) {
        if (!p->empty() && !std::filesystem::exists(*p)) {
            throw ConfigError("config: referenced file does not exist: " + p->string());
        }
    }
}

} // namespace harbor::cli
