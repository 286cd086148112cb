#include "harbor/cli/pipeline.hpp"

#include "harbor/arch/activity.hpp"
#include "harbor/arch/bootstrap.hpp"
#include "harbor/arch/findings.hpp"
#include "harbor/cli/svg.hpp"
#include "harbor/est/linreg.hpp"
#include "harbor/est/report.hpp"
#include "harbor/est/transforms.hpp"
#include "harbor/geo/cost_distance.hpp"
#include "harbor/ma/regions.hpp"
#include "harbor/matching/gbt.hpp"
#include "harbor/matching/greedy.hpp"
#include "harbor/panel/trade.hpp"
#include "harbor/util/csv.hpp"
#include "harbor/util/errors.hpp"
#include "harbor/util/parallel.hpp"
#include "harbor/util/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <set>

namespace harbor::cli {

namespace {

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "harbor: note: " << w << "\n";
}

std::string term_name(const est::EventStudyTerm& t) {
    return std::to_string(t.year) + "x" + t.treatment;
}

} // namespace

geo::CostSurface load_surface(const RunConfig& config, double alpha,
                              const std::filesystem::path& raster_path) {
    if (raster_path.empty()) throw ConfigError("no raster path configured");
    std::vector<geo::Polygon> forced;
    if (!config.forced_land.empty()) {
        for (auto& [id, poly] : geo::read_geojson_polygons(config.forced_land)) {
            forced.push_back(std::move(poly));
        }
    }
    geo::CostSurfaceOptions opts;
    opts.km_per_unit = config.km_per_unit;
    std::vector<std::string> warnings;
    opts.warnings = &warnings;
    geo::CostSurface surface = geo::build_cost_surface(raster_path, alpha, forced, opts);
    print_warnings(warnings);
    return surface;
}

MarketAccessStep run_market_access(const RunConfig& config, const geo::CostSurface& surface,
                                   double theta, std::vector<std::string>* warnings) {
    MarketAccessStep step;
    step.parishes = ma::read_parishes_csv(config.parishes);
    ma::PortsCsvOptions port_opts;
    port_opts.min_observations = config.min_port_observations;
    const std::vector<ma::Port> ports = ma::read_ports_csv(config.ports, port_opts, warnings);
    step.records =
        ma::compute_market_access(step.parishes, ports, theta, surface, config.threads, warnings);
    return step;
}

CensusJoin build_census_join(const RunConfig& config, const MarketAccessStep& ma_step,
                             std::vector<std::string>* warnings) {
    CensusJoin join;
    const auto records = panel::read_census_csv(config.census);
    std::map<std::string, std::string> counties;
    if (!config.counties.empty()) counties = panel::read_counties_csv(config.counties);

    panel::CensusAggregationOptions agg;
    agg.census_years = config.census_years;
    join.observations = panel::aggregate_census(records, counties, agg, warnings);

    std::map<std::string, ma::Region> region_of;
    for (const auto& p : ma_step.parishes) region_of[p.id] = p.region;
    std::map<std::string, double> dlm;
    for (const auto& r : ma_step.records) {
        if (!r.unreachable) dlm[r.parish_id] = r.delta_log_ma;
    }

    std::map<std::string, int> unit_of;
    for (auto& obs : join.observations) {
        const auto region_it = region_of.find(obs.parish_id);
        const auto ma_it = dlm.find(obs.parish_id);
        if (region_it == region_of.end() || ma_it == dlm.end()) {
            // Parishes without registry entries or with undefined MA are
            // excluded from the estimation sample.
            continue;
        }
        if (!unit_of.count(obs.parish_id)) {
            const int u = static_cast<int>(join.parish_ids.size());
            unit_of[obs.parish_id] = u;
            join.parish_ids.push_back(obs.parish_id);
            join.dummy_treat.push_back(region_it->second == ma::Region::West ? 1.0 : 0.0);
            join.ma_treat.push_back(ma_it->second);
            join.region_of.push_back(static_cast<int>(region_it->second));
        }
        obs.treatment_dummy = region_it->second == ma::Region::West ? 1 : 0;
        obs.delta_log_ma = ma_it->second;
    }
    join.years = config.census_years;
    std::sort(join.years.begin(), join.years.end());
    return join;
}

std::optional<double> outcome_value(const panel::PanelObservation& obs,
                                    const std::string& column) {
    if (column == "population") return static_cast<double>(obs.population);
    if (column == "child_women_ratio") return obs.child_women_ratio;
    if (column == "migrant_share") return obs.migrant_share;
    for (int g = 0; g < panel::kMajorGroups; ++g) {
        static const char* names[] = {"occ_0_1", "occ_2", "occ_3", "occ_4",
                                      "occ_5",   "occ_6", "occ_7_8_9"};
        if (column == names[g]) return static_cast<double>(obs.occ_counts[g]);
    }
    throw ConfigError("unknown outcome column '" + column + "'");
}

est::EventStudyFit run_panel_event_study(const CensusJoin& join, const EventStudyRun& run,
                                         const RunConfig& config) {
    std::map<std::string, int> unit_of;
    for (std::size_t u = 0; u < join.parish_ids.size(); ++u) {
        unit_of[join.parish_ids[u]] = static_cast<int>(u);
    }

    // Collect raw outcomes for transformable cells.
    std::vector<double> raw;
    std::vector<std::pair<int, int>> cells; // (unit, time index)
    std::map<int, int> time_index;
    for (std::size_t i = 0; i < join.years.size(); ++i) {
        time_index[join.years[i]] = static_cast<int>(i);
    }
    for (const auto& obs : join.observations) {
        const auto uit = unit_of.find(obs.parish_id);
        if (uit == unit_of.end()) continue;
        if (!run.unit_filter.empty() && !run.unit_filter[uit->second]) continue;
        const auto value = outcome_value(obs, run.outcome);
        if (!value) continue;
        raw.push_back(*value);
        cells.emplace_back(uit->second, time_index.at(obs.year));
    }
    if (raw.empty()) throw DataError("event study '" + run.spec_id + "': no usable cells");

    const est::TransformedOutcome transformed = est::transform_outcome(raw, run.transform);

    // Keep only event years that still have data (migration starts in 1845).
    std::set<int> times_present;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (transformed.include[i]) times_present.insert(cells[i].second);
    }
    if (times_present.size() < 2) {
        throw DataError("event study '" + run.spec_id + "': fewer than 2 usable event years");
    }
    std::vector<int> years;
    std::map<int, int> dense_time;
    for (int t : times_present) {
        dense_time[t] = static_cast<int>(years.size());
        years.push_back(join.years[t]);
    }
    int reference = config.reference_year;
    if (!std::count(years.begin(), years.end(), reference)) reference = years.front();

    std::vector<est::PanelRow> rows;
    rows.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!transformed.include[i]) continue;
        rows.push_back({cells[i].first, dense_time.at(cells[i].second), transformed.values[i]});
    }

    est::EventStudyOptions opts;
    opts.years = years;
    opts.reference_year = reference;
    opts.bonferroni_m = run.bonferroni_m;

    const int n_units = static_cast<int>(join.parish_ids.size());
    if (run.treatment == "dummy") {
        return est::twfe_event_study(rows, n_units, join.dummy_treat, opts);
    }
    if (run.treatment == "ma") {
        std::vector<double> treat = join.ma_treat;
        if (run.standardize_ma) {
            // Standardize over the units in the estimation sample.
            std::vector<char> in_sample(n_units, 0);
            for (const auto& r : rows) in_sample[r.unit] = 1;
            std::vector<double> vals;
            for (int u = 0; u < n_units; ++u) {
                if (in_sample[u]) vals.push_back(treat[u]);
            }
            const double m = mean(vals);
            const double sd = sample_sd(vals);
            if (sd > 0.0) {
                for (auto& v : treat) v = (v - m) / sd;
            }
        }
        return est::twfe_event_study(rows, n_units, treat, opts);
    }
    if (run.treatment == "three_region") {
        return est::three_region_event_study(rows, n_units, join.region_of, opts);
    }
    throw ConfigError("unknown treatment '" + run.treatment + "'");
}

std::vector<CoefficientRow> fit_to_rows(const std::string& spec_id,
                                        const est::EventStudyFit& fit) {
    std::vector<CoefficientRow> rows;
    for (const auto& t : fit.terms) {
        if (t.is_reference) continue;
        rows.push_back({spec_id, term_name(t), t.beta, t.se, t.p, t.p_bonferroni, fit.n_obs,
                        fit.n_clusters});
    }
    return rows;
}

void write_coefficients_csv(const std::filesystem::path& path,
                            const std::vector<CoefficientRow>& rows,
                            const std::string& comment) {
    CsvWriter w(path, comment);
    w.write_row(
        {"spec_id", "term", "estimate", "se", "p", "p_bonferroni", "n_obs", "n_clusters"});
    for (const auto& r : rows) {
        w.write_row({r.spec_id, r.term, CsvWriter::fmt(r.estimate), CsvWriter::fmt(r.se),
                     CsvWriter::fmt(r.p), CsvWriter::fmt(r.p_bonferroni),
                     std::to_string(r.n_obs), std::to_string(r.n_clusters)});
    }
}

std::vector<char> subgroup_filter(const std::string& name, const RunConfig& config,
                                  const CensusJoin& join) {
    const int n = static_cast<int>(join.parish_ids.size());
    if (name == "all") return {};

    std::map<std::string, geo::Point> centroid_of;
    for (const auto& p : ma::read_parishes_csv(config.parishes)) {
        centroid_of[p.id] = p.centroid;
    }
    const auto centroid = [&](int u) { return centroid_of.at(join.parish_ids[u]); };
    std::vector<char> keep(n, 1);

    if (name == "coastal5") {
        if (config.coast.empty()) throw ConfigError("subgroup coastal5 needs a coast geometry");
        const geo::Geometry coast = geo::read_geojson_geometry(config.coast);
        for (int u = 0; u < n; ++u) {
            keep[u] = coast.distance_to(centroid(u)) * config.km_per_unit < 5.0;
        }
    } else if (name == "excl_copenhagen") {
        for (int u = 0; u < n; ++u) {
            const geo::Point c = centroid(u);
            const double d = std::hypot(c.x - config.copenhagen_x, c.y - config.copenhagen_y) *
                             config.km_per_unit;
            keep[u] = d >= config.copenhagen_radius_km;
        }
    } else if (name == "excl_limfjord100") {
        if (config.fjord.empty()) {
            throw ConfigError("subgroup excl_limfjord100 needs a fjord geometry");
        }
        const geo::Geometry fjord = geo::read_geojson_geometry(config.fjord);
        for (int u = 0; u < n; ++u) {
            // Treated parishes stay; distant controls form the comparison.
            if (join.dummy_treat[u] > 0.0) continue;
            keep[u] = fjord.distance_to(centroid(u)) * config.km_per_unit >= 100.0;
        }
    } else if (name == "market5") {
        if (config.ports.empty()) throw ConfigError("subgroup market5 needs the port registry");
        ma::PortsCsvOptions port_opts;
        port_opts.min_observations = config.min_port_observations;
        const auto ports = ma::read_ports_csv(config.ports, port_opts);
        for (int u = 0; u < n; ++u) {
            const geo::Point c = centroid(u);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& p : ports) {
                best = std::min(best, std::hypot(c.x - p.location.x, c.y - p.location.y));
            }
            keep[u] = best * config.km_per_unit < 5.0;
        }
    } else {
        throw ConfigError("unknown control subgroup '" + name + "'");
    }
    return keep;
}

std::vector<CoefficientRow> run_trade_regressions(const RunConfig& config,
                                                  std::vector<std::string>* warnings) {
    const auto records = panel::read_sound_toll_csv(config.sound_toll);
    std::map<std::string, panel::PortLocation> locations;
    if (!config.port_locations.empty()) {
        const CsvTable t = read_csv(config.port_locations);
        const std::size_t c_port = t.col("port_id");
        const std::size_t c_loc = t.col("location");
        for (const auto& row : t.rows) {
            locations[row[c_port]] = panel::port_location_from_name(row[c_loc]);
        }
    }
    panel::TradePanelOptions opts;
    opts.exclude_1807_1814 = config.exclude_1807_1814;
    opts.exclude_1825_1833 = config.exclude_1825_1833;
    const auto trade = panel::build_trade_panel(records, locations, opts, warnings);

    std::vector<int> location_of(trade.size());
    std::vector<int> post(trade.size());
    std::vector<std::string> port_of(trade.size());
    std::vector<double> traffic(trade.size());
    for (std::size_t i = 0; i < trade.size(); ++i) {
        location_of[i] = static_cast<int>(trade[i].location);
        post[i] = trade[i].post ? 1 : 0;
        port_of[i] = trade[i].port_id;
        traffic[i] = static_cast<double>(trade[i].traffic);
    }
    const est::TradeDesign design = est::build_trade_design(location_of, post, port_of);

    std::vector<CoefficientRow> rows;
    const est::PpmlFit fit = est::ppml(design.X, traffic, design.cluster_of, design.n_clusters,
                                       design.names);
    for (std::size_t k = 0; k < design.names.size(); ++k) {
        const double beta = fit.beta[static_cast<Eigen::Index>(k)];
        const double se = fit.se[static_cast<Eigen::Index>(k)];
        const double p = se > 0.0 ? two_sided_p(beta / se) : (beta == 0.0 ? 1.0 : 0.0);
        rows.push_back(
            {"trade_ppml", design.names[k], beta, se, p, p, fit.n_obs, fit.n_clusters});
    }

    // OLS variants on the transformed outcome (same design, same clusters).
    for (const auto& [spec, kind] :
         std::vector<std::pair<std::string, est::Transform>>{
             {"trade_ols_log1p", est::Transform::Log1p},
             {"trade_ols_arcsinh", est::Transform::Arcsinh},
             {"trade_ols_extensive", est::Transform::Extensive}}) {
        const est::TransformedOutcome y = est::transform_outcome(traffic, kind);
        Eigen::VectorXd yv(static_cast<Eigen::Index>(y.values.size()));
        for (std::size_t i = 0; i < y.values.size(); ++i) {
            yv[static_cast<Eigen::Index>(i)] = y.values[i];
        }
        const Eigen::VectorXd beta = est::ols_solve(design.X, yv);
        const Eigen::VectorXd resid_vec = yv - design.X * beta;
        std::vector<double> resid(resid_vec.data(), resid_vec.data() + resid_vec.size());
        const Eigen::MatrixXd xtx_inv = (design.X.transpose() * design.X).inverse();
        const est::FitInternals internals{design.X, xtx_inv, resid, design.cluster_of,
                                          design.n_clusters,
                                          static_cast<int>(design.X.cols())};
        const Eigen::VectorXd se = est::cluster_robust_se(internals);
        for (std::size_t k = 0; k < design.names.size(); ++k) {
            const double b = beta[static_cast<Eigen::Index>(k)];
            const double s = se[static_cast<Eigen::Index>(k)];
            const double p = s > 0.0 ? two_sided_p(b / s) : (b == 0.0 ? 1.0 : 0.0);
            rows.push_back({spec, design.names[k], b, s, p, p,
                            static_cast<int>(trade.size()), design.n_clusters});
        }
    }
    return rows;
}

namespace {

// Occupation suite: 7 groups x 4 transforms x 2 treatments, Bonferroni m=56,
// APE shares against mean treated population in the last census year.
void run_occupation_suite(const RunConfig& config, const CensusJoin& join,
                          std::vector<CoefficientRow>& all_rows,
                          const std::filesystem::path& out_dir) {
    static const char* group_cols[] = {"occ_0_1", "occ_2", "occ_3", "occ_4",
                                       "occ_5",   "occ_6", "occ_7_8_9"};
    static const std::pair<const char*, est::Transform> transforms[] = {
        {"extensive", est::Transform::Extensive},
        {"intensive", est::Transform::Intensive},
        {"log1p", est::Transform::Log1p},
        {"arcsinh", est::Transform::Arcsinh},
    };
    const int last_year = *std::max_element(join.years.begin(), join.years.end());
    const int m = 56;

    // Treated means in the last census year for the APE share.
    double mean_pop = 0.0;
    std::map<std::string, double> mean_occ;
    int n_treated = 0;
    std::map<std::string, int> unit_of;
    for (std::size_t u = 0; u < join.parish_ids.size(); ++u) {
        unit_of[join.parish_ids[u]] = static_cast<int>(u);
    }
    for (const auto& obs : join.observations) {
        const auto it = unit_of.find(obs.parish_id);
        if (it == unit_of.end() || obs.year != last_year) continue;
        if (join.dummy_treat[it->second] <= 0.0) continue;
        ++n_treated;
        mean_pop += static_cast<double>(obs.population);
        for (int g = 0; g < panel::kMajorGroups; ++g) {
            mean_occ[group_cols[g]] += static_cast<double>(obs.occ_counts[g]);
        }
    }
    if (n_treated > 0) {
        mean_pop /= n_treated;
        for (auto& [k, v] : mean_occ) v /= n_treated;
    }

    // Independent regressions, run as a parallel job set; results land in
    // per-job slots and are emitted in job order, so output is identical for
    // any thread count.
    struct Job {
        EventStudyRun run;
        std::string group;
        std::string treatment;
        std::string transform_name;
    };
    std::vector<Job> jobs;
    for (const char* group : group_cols) {
        for (const auto& [tname, transform] : transforms) {
            for (const std::string treatment : {"dummy", "ma"}) {
                Job job;
                job.run.spec_id = std::string("occ_") + group + "_" + treatment + "_" + tname;
                job.run.outcome = group;
                job.run.transform = transform;
                job.run.treatment = treatment;
                job.run.bonferroni_m = m;
                job.group = group;
                job.treatment = treatment;
                job.transform_name = tname;
                jobs.push_back(std::move(job));
            }
        }
    }
    std::vector<std::optional<est::EventStudyFit>> fits(jobs.size());
    std::vector<std::string> misses(jobs.size());
    parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
        try {
            fits[j] = run_panel_event_study(join, jobs[j].run, config);
        } catch (const NumericError& e) {
            // Sparse occupation cells can defeat the intensive margin;
            // record the miss and move on.
            misses[j] = e.what();
        } catch (const DataError& e) {
            misses[j] = e.what();
        }
    });

    CsvWriter ape(out_dir / "occupations_ape_1901.csv", config.provenance());
    ape.write_row({"group", "treatment", "transform", "estimate", "se_bonferroni_z",
                   "ape_share", "n_parishes"});
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (!fits[j]) {
            std::cerr << "harbor: note: " << jobs[j].run.spec_id << " skipped: " << misses[j]
                      << "\n";
            continue;
        }
        const est::EventStudyFit& fit = *fits[j];
        const auto rows = fit_to_rows(jobs[j].run.spec_id, fit);
        all_rows.insert(all_rows.end(), rows.begin(), rows.end());
        const auto& t = fit.term(last_year);
        const double share =
            mean_pop > 0.0 ? est::ape_share(t.beta, mean_occ[jobs[j].group], mean_pop) : 0.0;
        ape.write_row({jobs[j].group, jobs[j].treatment, jobs[j].transform_name,
                       CsvWriter::fmt(t.beta),
                       CsvWriter::fmt(t.se * est::bonferroni_critical_z(m)),
                       CsvWriter::fmt(share), std::to_string(fit.n_parishes_included)});
    }
}

void run_arch_step(const RunConfig& config, const CensusJoin& join,
                   const std::filesystem::path& out_dir,
                   std::vector<CoefficientRow>& all_rows,
                   std::vector<std::string>* warnings) {
    const auto polygons = geo::read_geojson_polygons(config.parish_polygons);
    const arch::DatingModel model = arch::dating_model_from_name(config.dating_model);
    const auto findings =
        arch::read_findings_csv(config.findings, polygons, model, {}, warnings);

    // The arch universe is the parishes that carry treatment variables.
    std::map<std::string, int> unit_of;
    for (std::size_t u = 0; u < join.parish_ids.size(); ++u) {
        unit_of[join.parish_ids[u]] = static_cast<int>(u);
    }

    for (const auto& [kind_name, kind] :
         std::vector<std::pair<std::string, arch::FindingKind>>{
             {"coins", arch::FindingKind::Coin}, {"buildings", arch::FindingKind::Building}}) {
        std::vector<arch::FindingRecord> subset;
        for (const auto& f : findings) {
            if (f.kind == kind && unit_of.count(f.parish_id)) subset.push_back(f);
        }
        arch::ActivityConfig acfg;
        acfg.replicates = config.replicates;
        acfg.window_halfwidth = config.window;
        acfg.prior_c = config.prior_c;
        acfg.seed = config.seed;
        acfg.threads = config.threads;
        const arch::ActivityPanel panel =
            arch::monte_carlo_panel(subset, join.parish_ids, acfg);
        arch::write_activity_csv(out_dir / ("activity_" + kind_name + ".csv"), panel,
                                 config.provenance());
        arch::write_replicate_cache(out_dir / ("replicates_" + kind_name + ".apsa"), panel);

        for (const std::string treatment : {"dummy", "ma"}) {
            const std::vector<double>& treat =
                treatment == "dummy" ? join.dummy_treat : join.ma_treat;
            est::EventStudyFit fit =
                arch::arch_event_study(panel, treat, config.arch_reference_year);
            const arch::BootstrapResult boot = arch::clustered_bootstrap(
                panel, arch::make_event_study_estimator(treat, config.arch_reference_year),
                config.n_boot, config.seed, config.threads);
            arch::apply_bootstrap_se(fit, boot);
            const auto rows = fit_to_rows("arch_" + kind_name + "_" + treatment, fit);
            all_rows.insert(all_rows.end(), rows.begin(), rows.end());
            if (config.emit_plots) {
                EventPlotOptions plot;
                plot.title = "activity " + kind_name + " (" + treatment + ")";
                write_event_study_svg(
                    out_dir / ("arch_" + kind_name + "_" + treatment + ".svg"), fit, plot);
            }
        }
    }
}

void run_match_step(const RunConfig& config, const CensusJoin& join,
                    const std::filesystem::path& out_dir,
                    std::vector<CoefficientRow>& all_rows,
                    std::vector<std::string>* warnings) {
    const matching::SoilData raw = matching::read_soil_csv(config.soil);
    const matching::SoilData soil = matching::filter_soil_features(raw, 0.10);
    if (soil.feature_names.empty()) throw DataError("match: no soil features pass the filter");

    Eigen::MatrixXd X(static_cast<Eigen::Index>(soil.rows.size()),
                      static_cast<Eigen::Index>(soil.feature_names.size()));
    std::vector<int> y(soil.rows.size());
    for (std::size_t i = 0; i < soil.rows.size(); ++i) {
        y[i] = soil.rows[i].treated;
        for (std::size_t f = 0; f < soil.feature_names.size(); ++f) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) =
                soil.rows[i].soil_shares[f];
        }
    }
    matching::GbtOptions gbt;
    gbt.seed = config.seed;
    const matching::PropensityModel model = matching::fit_propensity(X, y, gbt);
    const std::vector<double> scores = model.predict_all(X);

    std::map<std::string, int> unit_of;
    for (std::size_t u = 0; u < join.parish_ids.size(); ++u) {
        unit_of[join.parish_ids[u]] = static_cast<int>(u);
    }
    std::vector<std::string> treated_ids, control_ids;
    std::vector<double> treated_scores, control_scores;
    for (std::size_t i = 0; i < soil.rows.size(); ++i) {
        const auto& row = soil.rows[i];
        if (row.treated) {
            treated_ids.push_back(row.parish_id);
            treated_scores.push_back(scores[i]);
            continue;
        }
        // Controls come from outside the waterway region entirely.
        const auto it = unit_of.find(row.parish_id);
        if (it != unit_of.end() && join.region_of[it->second] != 3) {
            if (warnings) {
                warnings->push_back("match: '" + row.parish_id +
                                    "' excluded from the control pool (waterway region)");
            }
            continue;
        }
        control_ids.push_back(row.parish_id);
        control_scores.push_back(scores[i]);
    }

    const matching::MatchResult result =
        matching::greedy_match(treated_ids, treated_scores, control_ids, control_scores,
                               config.seed);
    matching::write_matches_csv(out_dir / "matches.csv", result, config.provenance());
    const matching::BalanceReport balance =
        matching::balance_report(result, treated_scores, control_scores);
    matching::write_balance_csv(out_dir / "balance.csv", balance, config.provenance());

    // Matched-sample activity regression (coins, dummy treatment).
    if (!config.findings.empty() && !config.parish_polygons.empty()) {
        std::set<std::string> matched;
        for (const auto& pair : result.pairs) {
            matched.insert(pair.treated_id);
            matched.insert(pair.control_id);
        }
        std::vector<std::string> ids;
        std::vector<double> treat;
        for (const std::string& id : matched) {
            const auto it = unit_of.find(id);
            if (it == unit_of.end()) continue;
            ids.push_back(id);
            treat.push_back(join.dummy_treat[it->second]);
        }
        const auto polygons = geo::read_geojson_polygons(config.parish_polygons);
        const auto findings = arch::read_findings_csv(
            config.findings, polygons, arch::dating_model_from_name(config.dating_model), {},
            nullptr);
        std::vector<arch::FindingRecord> subset;
        std::set<std::string> idset(ids.begin(), ids.end());
        for (const auto& f : findings) {
            if (f.kind == arch::FindingKind::Coin && idset.count(f.parish_id)) {
                subset.push_back(f);
            }
        }
        arch::ActivityConfig acfg;
        acfg.replicates = config.replicates;
        acfg.window_halfwidth = config.window;
        acfg.prior_c = config.prior_c;
        acfg.seed = config.seed;
        acfg.threads = config.threads;
        const arch::ActivityPanel panel = arch::monte_carlo_panel(subset, ids, acfg);
        est::EventStudyFit fit =
            arch::arch_event_study(panel, treat, config.arch_reference_year);
        const arch::BootstrapResult boot = arch::clustered_bootstrap(
            panel, arch::make_event_study_estimator(treat, config.arch_reference_year),
            config.n_boot, config.seed, config.threads);
        arch::apply_bootstrap_se(fit, boot);
        const auto rows = fit_to_rows("arch_coins_dummy_matched", fit);
        all_rows.insert(all_rows.end(), rows.begin(), rows.end());
    }
}

void run_multiverse(const RunConfig& config, const geo::CostSurface& base_surface,
                    const CensusJoin& base_join, const std::filesystem::path& out_dir) {
    std::vector<CoefficientRow> rows;
    const int last_year = *std::max_element(base_join.years.begin(), base_join.years.end());
    const int pre_year = *std::min_element(base_join.years.begin(), base_join.years.end());

    const auto record = [&rows, last_year, pre_year](const std::string& spec_id,
                                                     const est::EventStudyFit& fit) {
        for (int year : {pre_year, last_year}) {
            const auto& t = fit.term(year);
            rows.push_back({spec_id, term_name(t), t.beta, t.se, t.p, t.p_bonferroni, fit.n_obs,
                            fit.n_clusters});
        }
    };

    // Control-subgroup universe at the default parameters.
    for (const std::string subgroup :
         {"all", "coastal5", "excl_copenhagen", "excl_limfjord100", "market5"}) {
        std::vector<char> filter;
        try {
            filter = subgroup_filter(subgroup, config, base_join);
        } catch (const ConfigError& e) {
            std::cerr << "harbor: note: multiverse subgroup " << subgroup
                      << " skipped: " << e.what() << "\n";
            continue;
        }
        for (const std::string treatment : {"dummy", "ma"}) {
            EventStudyRun run;
            run.spec_id = "pop_" + treatment + "_" + subgroup;
            run.treatment = treatment;
            run.unit_filter = filter;
            try {
                record(run.spec_id, run_panel_event_study(base_join, run, config));
            } catch (const std::exception& e) {
                std::cerr << "harbor: note: " << run.spec_id << " skipped: " << e.what()
                          << "\n";
            }
        }
    }

    // Parameter universe: theta x alpha grid, MA treatment standardized to
    // zero mean and unit variance for comparability.
    for (double alpha : config.alpha_grid) {
        const geo::CostSurface surface =
            alpha == config.alpha ? base_surface : load_surface(config, alpha, config.raster);
        for (double theta : config.theta_grid) {
            const MarketAccessStep step = run_market_access(config, surface, theta);
            CensusJoin join = base_join;
            std::map<std::string, double> dlm;
            for (const auto& r : step.records) {
                if (!r.unreachable) dlm[r.parish_id] = r.delta_log_ma;
            }
            // Parishes with undefined MA under these parameters drop out.
            std::vector<char> reachable(join.parish_ids.size(), 1);
            for (std::size_t u = 0; u < join.parish_ids.size(); ++u) {
                const auto it = dlm.find(join.parish_ids[u]);
                if (it == dlm.end()) {
                    reachable[u] = 0;
                } else {
                    join.ma_treat[u] = it->second;
                }
            }
            EventStudyRun run;
            if (std::count(reachable.begin(), reachable.end(), char(0)) > 0) {
                run.unit_filter = reachable;
            }
            char spec[96];
            std::snprintf(spec, sizeof(spec), "pop_ma_theta%g_alpha%g", theta, alpha);
            run.spec_id = spec;
            run.treatment = "ma";
            run.standardize_ma = true;
            try {
                record(run.spec_id, run_panel_event_study(join, run, config));
            } catch (const std::exception& e) {
                std::cerr << "harbor: note: " << run.spec_id << " skipped: " << e.what()
                          << "\n";
            }
        }
    }

    write_coefficients_csv(out_dir / "multiverse.csv", rows, config.provenance());
}

} // namespace

int cmd_pipeline(const RunConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.out_dir);
    std::vector<std::string> warnings;

    // Geography and market access.
    const geo::CostSurface surface = load_surface(config, config.alpha, config.raster);
    const MarketAccessStep ma_step =
        run_market_access(config, surface, config.theta, &warnings);
    ma::write_market_access_csv(config.out_dir / "market_access.csv", ma_step.records,
                                config.alpha, config.provenance());

    // Census panel.
    const CensusJoin join = build_census_join(config, ma_step, &warnings);
    panel::write_panel_csv(config.out_dir / "panel.csv", join.observations,
                           config.provenance());
    panel::write_occ_detail_csv(config.out_dir / "occ_detail.csv", join.observations,
                                config.provenance());

    std::vector<CoefficientRow> rows;
    // Population, fertility and migration event studies.
    const std::vector<EventStudyRun> runs = {
        {"pop_dummy", "population", est::Transform::Log, "dummy"},
        {"pop_ma", "population", est::Transform::Log, "ma"},
        {"pop_three_region", "population", est::Transform::Log, "three_region"},
        // Fertility is a log outcome; the occasional zero ratio drops out
        // the same way the intensive margin handles zero counts.
        {"fertility_dummy", "child_women_ratio", est::Transform::Intensive, "dummy"},
        {"fertility_ma", "child_women_ratio", est::Transform::Intensive, "ma"},
        {"migration_dummy", "migrant_share", est::Transform::Identity, "dummy"},
        {"migration_ma", "migrant_share", est::Transform::Identity, "ma"},
    };
    for (EventStudyRun run : runs) {
        if (config.control_subgroup != "all") {
            run.unit_filter = subgroup_filter(config.control_subgroup, config, join);
            run.spec_id += "_" + config.control_subgroup;
        }
        try {
            const est::EventStudyFit fit = run_panel_event_study(join, run, config);
            const auto fit_rows = fit_to_rows(run.spec_id, fit);
            rows.insert(rows.end(), fit_rows.begin(), fit_rows.end());
            if (config.emit_plots && run.treatment != "three_region") {
                EventPlotOptions plot;
                plot.title = run.spec_id;
                write_event_study_svg(config.out_dir / (run.spec_id + ".svg"), fit, plot);
            }
        } catch (const std::exception& e) {
            std::cerr << "harbor: note: " << run.spec_id << " skipped: " << e.what() << "\n";
        }
    }

    // Occupation suite with Bonferroni correction and APE shares.
    run_occupation_suite(config, join, rows, config.out_dir);

    // Trade regressions.
    if (!config.sound_toll.empty()) {
        const auto trade_rows = run_trade_regressions(config, &warnings);
        rows.insert(rows.end(), trade_rows.begin(), trade_rows.end());
    }

    // Archaeology.
    if (!config.findings.empty() && !config.parish_polygons.empty()) {
        run_arch_step(config, join, config.out_dir, rows, &warnings);
    }

    // Matching.
    if (!config.soil.empty()) {
        run_match_step(config, join, config.out_dir, rows, &warnings);
    }

    write_coefficients_csv(config.out_dir / "coefficients.csv", rows, config.provenance());

    if (config.multiverse) {
        run_multiverse(config, surface, join, config.out_dir);
    }

    print_warnings(warnings);
    return 0;
}

} // namespace harbor::cli
