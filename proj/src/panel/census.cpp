#include "harbor/panel/census.hpp"

#include "harbor/util/csv.hpp"
#include "harbor/util/errors.hpp"

#include <algorithm>
#include <set>

namespace harbor::panel {

int major_group_of(const std::string& hisco) {
    if (hisco.empty() || hisco[0] < '0' || hisco[0] > '9') return -1;
    switch (hisco[0]) {
        case '0':
        case '1': return 0;
        case '2': return 1;
        case '3': return 2;
        case '4': return 3;
        case '5': return 4;
        case '6': return 5;
        default: return 6; // 7, 8, 9
    }
}

namespace {

struct Accumulator {
    long population = 0;
    std::array<long, kMajorGroups> occ{};
    std::map<std::string, long> occ2, occ3;
    long children = 0;
    long women = 0;
    long migrants = 0;
    std::vector<long> age_bins;
};

Sex parse_sex(const std::string& s) {
    if (s == "f" || s == "female" || s == "F") return Sex::Female;
    if (s == "m" || s == "male" || s == "M") return Sex::Male;
    return Sex::Unknown;
}

} // namespace

std::vector<PanelObservation> aggregate_census(
    std::span<const CensusRecord> records,
    const std::map<std::string, std::string>& parish_to_county,
    const CensusAggregationOptions& opts, std::vector<std::string>* warnings) {
    if (opts.census_years.empty()) throw ConfigError("aggregate_census: empty census year set");
    std::set<int> year_set(opts.census_years.begin(), opts.census_years.end());
    const int n_bins = 90 / opts.age_bin_width + 1;

    std::map<std::pair<std::string, int>, Accumulator> cells;
    long unknown_birthplaces = 0;
    for (const CensusRecord& rec : records) {
        if (rec.age < 0) throw DataError("census: negative age for person " + rec.person_id);
        if (!year_set.count(rec.year)) {
            throw DataError("census: year " + std::to_string(rec.year) +
                            " for person " + rec.person_id + " is not a census year");
        }
        Accumulator& acc = cells[{rec.parish_id, rec.year}];
        if (acc.age_bins.empty()) acc.age_bins.assign(n_bins, 0);
        acc.population += 1;

        const int group = major_group_of(rec.hisco);
        if (group >= 0) {
            acc.occ[group] += 1;
            if (rec.hisco.size() >= 2) acc.occ2[rec.hisco.substr(0, 2)] += 1;
            if (rec.hisco.size() >= 3) acc.occ3[rec.hisco.substr(0, 3)] += 1;
        }

        if (rec.age >= opts.child_age_min && rec.age <= opts.child_age_max) acc.children += 1;
        if (rec.sex == Sex::Female && rec.age >= opts.woman_age_min &&
            rec.age <= opts.woman_age_max) {
            acc.women += 1;
        }

        if (rec.year >= opts.migrant_from_year) {
            if (rec.birth_county.empty()) {
                // Unknown birthplaces count as non-migrant.
                ++unknown_birthplaces;
            } else {
                const auto it = parish_to_county.find(rec.parish_id);
                if (it != parish_to_county.end() && rec.birth_county != it->second) {
                    acc.migrants += 1;
                }
            }
        }

        const int bin = std::min(rec.age / opts.age_bin_width, n_bins - 1);
        acc.age_bins[bin] += 1;
    }
    if (unknown_birthplaces > 0 && warnings) {
        warnings->push_back("census: " + std::to_string(unknown_birthplaces) +
                            " unknown birthplaces counted as non-migrant");
    }

    // Keep only parishes observed in every census year.
    std::map<std::string, int> years_seen;
    for (const auto& [key, acc] : cells) years_seen[key.first] += 1;
    std::vector<std::string> kept;
    for (const auto& [parish, n] : years_seen) {
        if (n == static_cast<int>(opts.census_years.size())) {
            kept.push_back(parish);
        } else if (warnings) {
            warnings->push_back("census: parish '" + parish + "' observed in " +
                                std::to_string(n) + "/" +
                                std::to_string(opts.census_years.size()) +
                                " census years; dropped");
        }
    }

    std::vector<int> years_sorted = opts.census_years;
    std::sort(years_sorted.begin(), years_sorted.end());

    std::vector<PanelObservation> panel;
    panel.reserve(kept.size() * years_sorted.size());
    for (const std::string& parish : kept) {
        for (int year : years_sorted) {
            const Accumulator& acc = cells.at({parish, year});
            PanelObservation obs;
            obs.parish_id = parish;
            obs.year = year;
            obs.population = acc.population;
            obs.occ_counts = acc.occ;
            obs.occ_2digit = acc.occ2;
            obs.occ_3digit = acc.occ3;
            if (acc.women > 0) {
                obs.child_women_ratio = static_cast<double>(acc.children) / acc.women;
            }
            if (year >= opts.migrant_from_year && acc.population > 0) {
                obs.migrant_share = static_cast<double>(acc.migrants) / acc.population;
            }
            obs.age_group_shares.resize(acc.age_bins.size());
            for (std::size_t b = 0; b < acc.age_bins.size(); ++b) {
                obs.age_group_shares[b] =
                    acc.population > 0 ? static_cast<double>(acc.age_bins[b]) / acc.population
                                       : 0.0;
            }
            panel.push_back(std::move(obs));
        }
    }
    return panel;
}

std::vector<CensusRecord> read_census_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t c_pid = t.col("person_id");
    const std::size_t c_parish = t.col("parish_id");
    const std::size_t c_year = t.col("year");
    const std::size_t c_age = t.col("age");
    const std::size_t c_sex = t.col("sex");
    const std::size_t c_bc = t.col("birth_county");
    const std::size_t c_hisco = t.col("hisco");

    std::vector<CensusRecord> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        CensusRecord rec;
        rec.person_id = row[c_pid];
        rec.parish_id = row[c_parish];
        rec.year = static_cast<int>(parse_long(row[c_year], path.string()));
        rec.age = static_cast<int>(parse_long(row[c_age], path.string()));
        rec.sex = parse_sex(row[c_sex]);
        rec.birth_county = row[c_bc];
        rec.hisco = row[c_hisco];
        if (!rec.hisco.empty() && (rec.hisco[0] < '0' || rec.hisco[0] > '9')) {
            throw DataError("census: bad HISCO code '" + rec.hisco + "' for person " +
                            rec.person_id);
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::map<std::string, std::string> read_counties_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t c_parish = t.col("parish_id");
    const std::size_t c_county = t.col("county");
    std::map<std::string, std::string> out;
    for (const auto& row : t.rows) out[row[c_parish]] = row[c_county];
    return out;
}

void write_panel_csv(const std::filesystem::path& path, std::span<const PanelObservation> panel,
                     const std::string& comment) {
    CsvWriter w(path, comment);
    std::vector<std::string> header = {"parish_id", "year", "population"};
    header.insert(header.end(), {"occ_0_1", "occ_2", "occ_3", "occ_4", "occ_5", "occ_6",
                                 "occ_7_8_9"});
    header.insert(header.end(),
                  {"child_women_ratio", "migrant_share", "treatment_dummy", "delta_log_ma"});
    w.write_row(header);
    for (const auto& obs : panel) {
        std::vector<std::string> row = {obs.parish_id, std::to_string(obs.year),
                                        std::to_string(obs.population)};
        for (long c : obs.occ_counts) row.push_back(std::to_string(c));
        row.push_back(obs.child_women_ratio ? CsvWriter::fmt(*obs.child_women_ratio) : "");
        row.push_back(obs.migrant_share ? CsvWriter::fmt(*obs.migrant_share) : "");
        row.push_back(std::to_string(obs.treatment_dummy));
        row.push_back(CsvWriter::fmt(obs.delta_log_ma));
        w.write_row(row);
    }
}

void write_occ_detail_csv(const std::filesystem::path& path,
                          std::span<const PanelObservation> panel, const std::string& comment) {
    CsvWriter w(path, comment);
    w.write_row({"parish_id", "year", "prefix", "count"});
    for (const auto& obs : panel) {
        for (const auto& [prefix, count] : obs.occ_2digit) {
            w.write_row({obs.parish_id, std::to_string(obs.year), prefix,
                         std::to_string(count)});
        }
        for (const auto& [prefix, count] : obs.occ_3digit) {
            w.write_row({obs.parish_id, std::to_string(obs.year), prefix,
                         std::to_string(count)});
        }
    }
}

} // namespace harbor::panel
