#include "harbor/panel/trade.hpp"

#include "harbor/util/csv.hpp"
#include "harbor/util/errors.hpp"

#include <algorithm>
#include <set>

namespace harbor::panel {

PortLocation port_location_from_name(const std::string& name) {
    if (name == "west") return PortLocation::West;
    if (name == "middle") return PortLocation::Middle;
    if (name == "east") return PortLocation::East;
    if (name == "other" || name.empty()) return PortLocation::Other;
    throw DataError("unknown port location '" + name + "'");
}

std::string port_location_name(PortLocation loc) {
    switch (loc) {
        case PortLocation::West: return "west";
        case PortLocation::Middle: return "middle";
        case PortLocation::East: return "east";
        case PortLocation::Other: return "other";
    }
    return "other";
}

std::vector<TradeObservation> build_trade_panel(
    std::span<const SoundTollRecord> records,
    const std::map<std::string, PortLocation>& port_locations, const TradePanelOptions& opts,
    std::vector<std::string>* warnings) {
    if (opts.year_min > opts.year_max) throw ConfigError("trade panel: year_min > year_max");

    std::map<std::pair<std::string, int>, long> traffic;
    std::set<std::string> ports;
    std::set<std::string> unmapped;
    for (const SoundTollRecord& rec : records) {
        if (rec.passages < 0) throw DataError("trade panel: negative passages");
        if (rec.year < opts.year_min || rec.year > opts.year_max) continue;
        traffic[{rec.port_id, rec.year}] += rec.passages;
        ports.insert(rec.port_id);
        if (!port_locations.count(rec.port_id)) unmapped.insert(rec.port_id);
    }
    // The panel covers the full port registry even when a port has no
    // passages at all in range; zeros matter for the estimators.
    for (const auto& [port, loc] : port_locations) ports.insert(port);
    if (warnings) {
        for (const auto& p : unmapped) {
            warnings->push_back("trade panel: port '" + p + "' not in registry; location=other");
        }
    }

    auto excluded = [&opts](int year) {
        if (opts.exclude_1807_1814 && year >= 1807 && year <= 1814) return true;
        if (opts.exclude_1825_1833 && year >= 1825 && year <= 1833) return true;
        return false;
    };

    std::vector<TradeObservation> panel;
    for (const std::string& port : ports) {
        const auto loc_it = port_locations.find(port);
        const PortLocation loc =
            loc_it == port_locations.end() ? PortLocation::Other : loc_it->second;
        for (int year = opts.year_min; year <= opts.year_max; ++year) {
            if (excluded(year)) continue;
            TradeObservation obs;
            obs.port_id = port;
            obs.year = year;
            const auto it = traffic.find({port, year});
            obs.traffic = it == traffic.end() ? 0 : it->second;
            obs.location = loc;
            obs.post = year >= opts.post_year;
            panel.push_back(std::move(obs));
        }
    }
    return panel;
}

std::vector<SoundTollRecord> read_sound_toll_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t c_port = t.col("port_id");
    const std::size_t c_year = t.col("year");
    const std::size_t c_pass = t.col("passages");
    std::vector<SoundTollRecord> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        SoundTollRecord rec;
        rec.port_id = row[c_port];
        rec.year = static_cast<int>(parse_long(row[c_year], path.string()));
        rec.passages = parse_long(row[c_pass], path.string());
        out.push_back(std::move(rec));
    }
    return out;
}

void write_trade_panel_csv(const std::filesystem::path& path,
                           std::span<const TradeObservation> panel, const std::string& comment) {
    CsvWriter w(path, comment);
    w.write_row({"port_id", "year", "traffic", "location", "post"});
    for (const auto& obs : panel) {
        w.write_row({obs.port_id, std::to_string(obs.year), std::to_string(obs.traffic),
                     port_location_name(obs.location), obs.post ? "1" : "0"});
    }
}

} // namespace harbor::panel
