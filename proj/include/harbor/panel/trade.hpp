#ifndef HARBOR_PANEL_TRADE_HPP
#define HARBOR_PANEL_TRADE_HPP

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace harbor::panel {

enum class PortLocation { West = 0, Middle = 1, East = 2, Other = 3 };

PortLocation port_location_from_name(const std::string& name);
std::string port_location_name(PortLocation loc);

struct SoundTollRecord {
    std::string port_id;
    int year = 0;
    long passages = 0;
};

struct TradeObservation {
    std::string port_id;
    int year = 0;
    long traffic = 0;
    PortLocation location = PortLocation::Other;
    bool post = false; // year >= post_year
};

struct TradePanelOptions {
    int year_min = 1750;
    int year_max = 1855;
    int post_year = 1834;
    bool exclude_1807_1814 = false; // Napoleonic war window
    bool exclude_1825_1833 = false; // pre-navigability window
};

/// Balanced port x year panel of traffic sums over [year_min, year_max]
/// (zero-filled), with location and post flags. Records outside the year
/// range are ignored; unmapped ports get location Other and a warning.
std::vector<TradeObservation> build_trade_panel(
    std::span<const SoundTollRecord> records,
    const std::map<std::string, PortLocation>& port_locations,
    const TradePanelOptions& opts = {}, std::vector<std::string>* warnings = nullptr);

std::vector<SoundTollRecord> read_sound_toll_csv(const std::filesystem::path& path);
void write_trade_panel_csv(const std::filesystem::path& path,
                           std::span<const TradeObservation> panel, const std::string& comment);

} // namespace harbor::panel

#endif
