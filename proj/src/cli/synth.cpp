#include "harbor/cli/synth.hpp"

#include "harbor/arch/activity.hpp"
#include "harbor/est/event_study.hpp"
#include "harbor/geo/grid.hpp"
#include "harbor/util/csv.hpp"
#include "harbor/util/errors.hpp"
#include "harbor/util/rng.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

namespace harbor::cli {

namespace {

// World layout (60 x 40 cells, 1 km each):
//   cols 0..1   west coast strip (land, parishes)
//   cols 2..24  open sea
//   cols 25..27 barrier (land); channel strip rows 18..21 when open
//   cols 28..45 lagoon (water rows 4..35, land frame)
//   cols 46..59 east land band (parishes)
constexpr int kW = 60;
constexpr int kH = 40;

geo::AsciiGrid world_grid(bool channel_open) {
    geo::AsciiGrid g;
    g.ncols = kW;
    g.nrows = kH;
    g.xllcorner = 0.0;
    g.yllcorner = 0.0;
    g.cellsize = 1.0;
    g.values.assign(static_cast<std::size_t>(kW) * kH, 1.0);
    for (int r = 0; r < kH; ++r) {
        for (int c = 2; c <= 24; ++c) g.at(c, r) = 0.0; // open sea
    }
    for (int r = 4; r <= 35; ++r) {
        for (int c = 28; c <= 45; ++c) g.at(c, r) = 0.0; // lagoon
    }
    if (channel_open) {
        for (int r = 18; r <= 21; ++r) {
            for (int c = 25; c <= 27; ++c) g.at(c, r) = 0.0;
        }
    }
    return g;
}

long poisson_draw(Rng& rng, double mu) {
    if (mu <= 0.0) return 0;
    const double u = rng.next_unit();
    double p = std::exp(-mu), cdf = p;
    long k = 0;
    while (u > cdf && k < 100000) {
        ++k;
        p *= mu / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

struct Parish {
    std::string id;
    double x, y;
    bool treated;
    std::string region;
    std::string county;
};

} // namespace

SyntheticWorld generate_synthetic_world(const SynthParams& params,
                                        const std::filesystem::path& out_dir) {
    if (params.n_parishes < params.n_treated + 20) {
        throw ConfigError("synth: need at least 20 control parishes");
    }
    std::filesystem::create_directories(out_dir);
    SyntheticWorld world;
    world.dir = out_dir;

    // Rasters.
    world.raster_open = out_dir / "raster_open.asc";
    world.raster_closed = out_dir / "raster_closed.asc";
    geo::write_ascii_grid(world.raster_open, world_grid(true));
    geo::write_ascii_grid(world.raster_closed, world_grid(false));

    // Parishes: treated hugging the lagoon's east shore, controls split
    // between the west coast strip and the far east band.
    std::vector<Parish> parishes;
    for (int i = 0; i < params.n_treated; ++i) {
        Parish p;
        p.id = "west_" + std::to_string(i);
        p.x = 46.5 + static_cast<double>(i / 32);
        p.y = 4.5 + static_cast<double>(i % 32);
        p.treated = true;
        p.region = "west";
        p.county = "vestland";
        parishes.push_back(p);
    }
    const int n_controls = params.n_parishes - params.n_treated;
    const int n_west_coast = n_controls / 2;
    for (int i = 0; i < n_west_coast; ++i) {
        Parish p;
        p.id = "coast_" + std::to_string(i);
        p.x = 0.5 + static_cast<double>(i / 36);
        p.y = 2.5 + static_cast<double>(i % 36);
        p.treated = false;
        p.region = "reference";
        p.county = "vestland";
        parishes.push_back(p);
    }
    for (int i = 0; i < n_controls - n_west_coast; ++i) {
        Parish p;
        p.id = "east_" + std::to_string(i);
        p.x = 52.5 + static_cast<double>(i / 32);
        p.y = 4.5 + static_cast<double>(i % 32);
        p.treated = false;
        // A few indirectly-placed parishes exercise the three-region path.
        p.region = i < 6 ? "middle" : (i < 12 ? "east" : "reference");
        p.county = "ostland";
        parishes.push_back(p);
    }

    world.parishes = out_dir / "parishes.csv";
    {
        CsvWriter w(world.parishes, "synthetic world seed=" + std::to_string(params.seed));
        w.write_row({"id", "lon", "lat", "region"});
        for (const auto& p : parishes) {
            w.write_row({p.id, CsvWriter::fmt(p.x), CsvWriter::fmt(p.y), p.region});
        }
    }

    world.parish_polygons = out_dir / "parish_polygons.geojson";
    {
        nlohmann::json fc;
        fc["type"] = "FeatureCollection";
        fc["features"] = nlohmann::json::array();
        for (const auto& p : parishes) {
            nlohmann::json f;
            f["type"] = "Feature";
            f["properties"] = {{"id", p.id}};
            f["geometry"]["type"] = "Polygon";
            const double h = 0.45;
            f["geometry"]["coordinates"] = {{
                {p.x - h, p.y - h}, {p.x + h, p.y - h}, {p.x + h, p.y + h},
                {p.x - h, p.y + h}, {p.x - h, p.y - h},
            }};
            fc["features"].push_back(std::move(f));
        }
        std::ofstream out(world.parish_polygons);
        out << fc.dump(1) << "\n";
    }

    // Ports. Baseline H = sea ports; the lagoon ports join in H*.
    struct SynthPort {
        std::string id;
        double x, y;
        bool baseline;
        std::string location;
        double pre_rate;
        double post_jump; // log points
    };
    const std::vector<SynthPort> ports = {
        {"sea_a", 4.5, 10.5, true, "other", 30.0, 0.0},
        {"sea_b", 4.5, 30.5, true, "other", 30.0, 0.0},
        {"sea_c", 14.5, 20.5, true, "other", 30.0, 0.0},
        {"sea_d", 20.5, 6.5, true, "other", 30.0, 0.0},
        {"sea_e", 9.5, 35.5, true, "east", 25.0, params.trade_post_east},
        {"sea_f", 9.5, 5.5, true, "east", 25.0, params.trade_post_east},
        {"lag_w1", 30.5, 20.5, false, "west", 1.0, params.trade_post_west},
        {"lag_w2", 29.5, 14.5, false, "west", 1.0, params.trade_post_west},
        {"lag_w3", 31.5, 26.5, false, "west", 1.0, params.trade_post_west},
        {"lag_m1", 41.5, 24.5, false, "middle", 0.8, params.trade_post_middle},
        {"lag_m2", 42.5, 10.5, false, "middle", 0.8, params.trade_post_middle},
        {"lag_m3", 44.5, 18.5, false, "middle", 0.8, params.trade_post_middle},
    };
    world.ports = out_dir / "ports.csv";
    {
        CsvWriter w(world.ports, "synthetic world seed=" + std::to_string(params.seed));
        w.write_row({"id", "lon", "lat", "in_baseline", "in_counterfactual", "observations"});
        for (const auto& p : ports) {
            w.write_row({p.id, CsvWriter::fmt(p.x), CsvWriter::fmt(p.y),
                         p.baseline ? "1" : "0", "1", "10"});
        }
    }
    world.port_locations = out_dir / "port_locations.csv";
    {
        CsvWriter w(world.port_locations, "synthetic world seed=" + std::to_string(params.seed));
        w.write_row({"port_id", "location"});
        for (const auto& p : ports) w.write_row({p.id, p.location});
    }

    // Census: log population = parish FE + year FE + beta_j * treated + noise.
    const std::vector<int> census_years = {1787, 1801, 1834, 1840, 1845, 1850, 1860, 1880, 1901};
    Rng census_rng = Rng::substream(params.seed, 1);
    world.census = out_dir / "census.csv";
    {
        CsvWriter w(world.census, "synthetic world seed=" + std::to_string(params.seed));
        w.write_row({"person_id", "parish_id", "year", "age", "sex", "birth_county", "hisco"});
        long person = 0;
        for (const auto& parish : parishes) {
            const double fe = census_rng.normal(params.base_log_population, 0.25);
            for (std::size_t yi = 0; yi < census_years.size(); ++yi) {
                const int year = census_years[yi];
                double logpop = fe + 0.015 * static_cast<double>(yi) +
                                census_rng.normal(0.0, params.noise_sigma);
                if (parish.treated) {
                    const auto it = params.census_beta.find(year);
                    if (it != params.census_beta.end()) logpop += it->second;
                }
                const long pop = std::max<long>(20, std::lround(std::exp(logpop)));
                for (long k = 0; k < pop; ++k) {
                    const double u_age = census_rng.next_unit();
                    int age;
                    if (u_age < 0.12) age = 1 + static_cast<int>(census_rng.below(5));
                    else if (u_age < 0.45) age = 15 + static_cast<int>(census_rng.below(31));
                    else age = static_cast<int>(census_rng.below(80));
                    const bool female = census_rng.below(2) == 0;
                    std::string hisco;
                    const double u_occ = census_rng.next_unit();
                    if (u_occ < 0.05) hisco = "64120";      // fishermen
                    else if (u_occ < 0.09) hisco = "75400"; // spinners/weavers
                    else if (u_occ < 0.35) hisco = "61110"; // farmers
                    std::string birth = parish.county;
                    if (census_rng.next_unit() < 0.10) {
                        birth = parish.county == "vestland" ? "ostland" : "vestland";
                    }
                    w.write_row({"per" + std::to_string(person++), parish.id,
                                 std::to_string(year), std::to_string(age),
                                 female ? "f" : "m", birth, hisco});
                }
            }
        }
    }

    world.counties = out_dir / "counties.csv";
    {
        CsvWriter w(world.counties, "synthetic world seed=" + std::to_string(params.seed));
        w.write_row({"parish_id", "county"});
        for (const auto& p : parishes) w.write_row({p.id, p.county});
    }

    // Sound Toll traffic, 1750-1855.
    Rng trade_rng = Rng::substream(params.seed, 2);
    world.sound_toll = out_dir / "sound_toll.csv";
    {
        CsvWriter w(world.sound_toll, "synthetic world seed=" + std::to_string(params.seed));
        w.write_row({"port_id", "year", "passages"});
        for (const auto& p : ports) {
            for (int year = 1750; year <= 1855; ++year) {
                const double rate =
                    year >= 1834 ? p.pre_rate * std::exp(p.post_jump) : p.pre_rate;
                const long passages = poisson_draw(trade_rng, rate);
                if (passages > 0) {
                    w.write_row({p.id, std::to_string(year), std::to_string(passages)});
                }
            }
        }
    }

    // Findings: treated parishes' datings end at treated_finding_last_year,
    // control datings span the whole period.
    Rng find_rng = Rng::substream(params.seed, 3);
    world.findings = out_dir / "findings.csv";
    std::vector<arch::FindingRecord> coin_findings;
    {
        CsvWriter w(world.findings, "synthetic world seed=" + std::to_string(params.seed));
        w.write_row({"finding_id", "lon", "lat", "kind", "year_min", "year_max"});
        long id = 0;
        for (const auto& parish : parishes) {
            for (int k = 0; k < params.findings_per_parish; ++k) {
                const int last = parish.treated ? params.treated_finding_last_year : 1500;
                const int y0 = 750 + static_cast<int>(find_rng.below(60));
                const int y1 =
                    last - static_cast<int>(find_rng.below(static_cast<std::uint64_t>(40)));
                const std::string kind = k % 2 == 0 ? "coin" : "building";
                const std::string fid = "find" + std::to_string(id++);
                w.write_row({fid, CsvWriter::fmt(parish.x), CsvWriter::fmt(parish.y), kind,
                             std::to_string(y0), std::to_string(y1)});
                if (kind == "coin") {
                    coin_findings.push_back({fid, parish.id, arch::FindingKind::Coin, y0, y1,
                                             arch::DatingModel::Uniform});
                }
            }
        }
    }

    // Soil shares: treated parishes sit on a distinct but overlapping mix.
    Rng soil_rng = Rng::substream(params.seed, 4);
    world.soil = out_dir / "soil.csv";
    {
        CsvWriter w(world.soil, "synthetic world seed=" + std::to_string(params.seed));
        w.write_row({"parish_id", "moraine_clay", "marsh", "sand", "peat", "treated"});
        for (const auto& p : parishes) {
            double a = p.treated ? 0.45 + 0.2 * soil_rng.next_unit()
                                 : 0.15 + 0.25 * soil_rng.next_unit();
            double b = p.treated ? 0.05 + 0.1 * soil_rng.next_unit()
                                 : 0.2 + 0.2 * soil_rng.next_unit();
            double c = 0.1 + 0.15 * soil_rng.next_unit();
            const double total = a + b + c;
            if (total > 0.97) {
                a *= 0.97 / total;
                b *= 0.97 / total;
                c *= 0.97 / total;
            }
            const double d = std::max(0.0, 1.0 - a - b - c - 0.02);
            w.write_row({p.id, CsvWriter::fmt(a), CsvWriter::fmt(b), CsvWriter::fmt(c),
                         CsvWriter::fmt(d), p.treated ? "1" : "0"});
        }
    }

    // Geometries for region classification and control subgroups.
    world.fjord = out_dir / "fjord.geojson";
    {
        std::ofstream out(world.fjord);
        out << R"({"type": "LineString", "coordinates": [[28, 20], [45, 20]]})" << "\n";
    }
    world.coast = out_dir / "coast.geojson";
    {
        // Open-sea shoreline plus the lagoon shore (also salt water).
        std::ofstream out(world.coast);
        out << R"({"type": "MultiLineString", "coordinates": [)"
            << R"([[2, 0], [2, 40]], )"
            << R"([[28, 4], [45, 4], [45, 35], [28, 35], [28, 4]]]})"
            << "\n";
    }

    // Ground truth: injected parameters plus the exact (product-formula)
    // coin activity panel and the event-study coefficients it implies.
    std::vector<std::string> parish_ids;
    std::vector<double> treat;
    for (const auto& p : parishes) {
        parish_ids.push_back(p.id);
        treat.push_back(p.treated ? 1.0 : 0.0);
        if (p.treated) world.treated_ids.push_back(p.id);
    }
    std::vector<int> grid_years;
    for (int y = 750; y <= 1500; y += 50) grid_years.push_back(y);

    std::map<std::string, std::vector<arch::FindingRecord>> by_parish;
    for (const auto& f : coin_findings) by_parish[f.parish_id].push_back(f);

    std::vector<est::PanelRow> exact_rows;
    const auto exact_panel_path = out_dir / "exact_activity_coins.csv";
    {
        CsvWriter w(exact_panel_path, "synthetic world seed=" + std::to_string(params.seed));
        w.write_row({"parish_id", "year", "probability"});
        for (std::size_t p = 0; p < parish_ids.size(); ++p) {
            const auto it = by_parish.find(parish_ids[p]);
            for (std::size_t g = 0; g < grid_years.size(); ++g) {
                const double prob =
                    it == by_parish.end()
                        ? 0.0
                        : arch::exact_window_probability(it->second, grid_years[g], 25);
                exact_rows.push_back(
                    {static_cast<int>(p), static_cast<int>(g), prob});
                w.write_row({parish_ids[p], std::to_string(grid_years[g]),
                             CsvWriter::fmt(prob)});
            }
        }
    }
    est::EventStudyOptions arch_opts;
    arch_opts.years = grid_years;
    arch_opts.reference_year = 1000;
    const est::EventStudyFit exact_fit =
        est::twfe_event_study(exact_rows, static_cast<int>(parish_ids.size()), treat, arch_opts);

    nlohmann::json truth;
    truth["seed"] = params.seed;
    truth["treated_parishes"] = world.treated_ids;
    truth["noise_sigma"] = params.noise_sigma;
    for (const auto& [year, beta] : params.census_beta) {
        truth["census_beta_by_year"][std::to_string(year)] = beta;
    }
    truth["trade_post"] = {{"west", params.trade_post_west},
                           {"middle", params.trade_post_middle},
                           {"east", params.trade_post_east}};
    for (const auto& term : exact_fit.terms) {
        truth["arch_exact_beta_by_year"][std::to_string(term.year)] = term.beta;
    }
    truth["exact_activity_panel"] = exact_panel_path.filename().string();
    world.ground_truth = out_dir / "ground_truth.json";
    {
        std::ofstream out(world.ground_truth);
        out << truth.dump(1) << "\n";
    }

    // Ready-to-run config.
    world.config_file = out_dir / "synth_config.cfg";
    {
        std::ofstream out(world.config_file);
        out << "[paths]\n";
        out << "raster = " << world.raster_open.string() << "\n";
        out << "raster_closed = " << world.raster_closed.string() << "\n";
        out << "parishes = " << world.parishes.string() << "\n";
        out << "ports = " << world.ports.string() << "\n";
        out << "port_locations = " << world.port_locations.string() << "\n";
        out << "census = " << world.census.string() << "\n";
        out << "counties = " << world.counties.string() << "\n";
        out << "sound_toll = " << world.sound_toll.string() << "\n";
        out << "findings = " << world.findings.string() << "\n";
        out << "parish_polygons = " << world.parish_polygons.string() << "\n";
        out << "soil = " << world.soil.string() << "\n";
        out << "fjord = " << world.fjord.string() << "\n";
        out << "coast = " << world.coast.string() << "\n";
        out << "[params]\n";
        out << "alpha = 10\n";
        out << "theta = -1\n";
        out << "seed = " << params.seed << "\n";
        out << "copenhagen_x = 58\n";
        out << "copenhagen_y = 2\n";
        out << "[toggles]\n";
        out << "dating_model = uniform\n";
    }

    return world;
}

} // namespace harbor::cli
