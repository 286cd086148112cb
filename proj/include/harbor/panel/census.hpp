#ifndef HARBOR_PANEL_CENSUS_HPP
#define HARBOR_PANEL_CENSUS_HPP

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace harbor::panel {

enum class Sex { Female, Male, Unknown };

struct CensusRecord {
    std::string person_id;
    std::string parish_id;
    int year = 0;
    int age = 0;
    Sex sex = Sex::Unknown;
    std::string birth_county; // empty = unknown
    std::string hisco;        // 5-digit code, empty = none
};

/// Major HISCO occupation groups in the order {0/1}, 2, 3, 4, 5, 6, {7/8/9}.
inline constexpr int kMajorGroups = 7;
inline constexpr std::array<const char*, kMajorGroups> kMajorGroupNames = {
    "0/1", "2", "3", "4", "5", "6", "7/8/9"};

/// Group index for a HISCO code's first digit; -1 for empty/invalid codes.
int major_group_of(const std::string& hisco);

struct PanelObservation {
    std::string parish_id;
    int year = 0;
    long population = 0;
    std::array<long, kMajorGroups> occ_counts{};
    /// Counts by leading 2- and 3-digit HISCO prefixes.
    std::map<std::string, long> occ_2digit;
    std::map<std::string, long> occ_3digit;
    std::optional<double> child_women_ratio; // missing when no women aged 15-45
    std::optional<double> migrant_share;     // observed from 1845 on
    std::vector<double> age_group_shares;
    int treatment_dummy = 0;    // filled by the pipeline join
    double delta_log_ma = 0.0;  // filled by the pipeline join
};

struct CensusAggregationOptions {
    std::vector<int> census_years = {1787, 1801, 1834, 1840, 1845, 1850, 1860, 1880, 1901};
    int age_bin_width = 10;     // bins 0-9, ..., 80-89, 90+
    int migrant_from_year = 1845;
    int child_age_min = 1, child_age_max = 5;
    int woman_age_min = 15, woman_age_max = 45;
};

/// Parish x year aggregation of the census stream. Parishes not observed in
/// every census year are dropped (and reported via warnings). The output is
/// balanced and sorted by (parish, year); aggregation is order-invariant in
/// the input stream.
std::vector<PanelObservation> aggregate_census(
    std::span<const CensusRecord> records,
    const std::map<std::string, std::string>& parish_to_county,
    const CensusAggregationOptions& opts = {}, std::vector<std::string>* warnings = nullptr);

std::vector<CensusRecord> read_census_csv(const std::filesystem::path& path);
std::map<std::string, std::string> read_counties_csv(const std::filesystem::path& path);
void write_panel_csv(const std::filesystem::path& path, std::span<const PanelObservation> panel,
                     const std::string& comment);
void write_occ_detail_csv(const std::filesystem::path& path,
                          std::span<const PanelObservation> panel, const std::string& comment);

} // namespace harbor::panel

#endif
