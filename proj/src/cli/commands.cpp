#include "harbor/cli/commands.hpp"

#include "harbor/arch/activity.hpp"
#include "harbor/arch/bootstrap.hpp"
#include "harbor/arch/findings.hpp"
#include "harbor/cli/config.hpp"
#include "harbor/cli/pipeline.hpp"
#include "harbor/cli/svg.hpp"
#include "harbor/cli/synth.hpp"
#include "harbor/est/report.hpp"
#include "harbor/geo/cost_distance.hpp"
#include "harbor/matching/gbt.hpp"
#include "harbor/matching/greedy.hpp"
#include "harbor/util/csv.hpp"
#include "harbor/util/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <set>

namespace harbor::cli {

namespace {

struct CommonFlags {
    std::string config_file;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_file, "sectioned key=value config file");
    cmd->add_option("--set", flags.overrides, "override config values as key=value")
        ->take_all();
    cmd->add_option("--out-dir", flags.out_dir, "output directory");
    cmd->add_option("--seed", flags.seed, "random seed")->each([&flags](const std::string&) {
        flags.seed_given = true;
    });
    cmd->add_option("--threads", flags.threads, "worker threads");
}

RunConfig make_config(const CommonFlags& flags) {
    RunConfig config;
    if (!flags.config_file.empty()) config = load_config(flags.config_file);
    for (const std::string& kv : flags.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        }
        apply_override(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (flags.seed_given) {
        config.seed = flags.seed;
        config.seed_set = true;
    }
    if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
    if (flags.threads > 0) config.threads = flags.threads;
    return config;
}

int cmd_costdist(const RunConfig& config, double src_x, double src_y) {
    config.validate(false);
    std::filesystem::create_directories(config.out_dir);
    const geo::CostSurface surface = load_surface(config, config.alpha, config.raster);
    const auto cell = surface.snap({src_x, src_y});
    if (!cell) throw DataError("costdist: source point outside the raster extent");
    geo::CellCoord start = *cell;
    if (surface.cell(start) == geo::CellClass::Land) {
        const auto moved = surface.nearest_navigable(start);
        if (moved) start = *moved;
    }
    const geo::CostDistanceField field = geo::cost_distance(surface, start);
    geo::write_distance_csv(config.out_dir / "costdist.csv", field, config.provenance());
    std::cout << "wrote " << (config.out_dir / "costdist.csv").string() << "\n";
    return 0;
}

int cmd_ma(const RunConfig& config) {
    config.validate(false);
    std::filesystem::create_directories(config.out_dir);
    const geo::CostSurface surface = load_surface(config, config.alpha, config.raster);
    std::vector<std::string> warnings;
    const MarketAccessStep step = run_market_access(config, surface, config.theta, &warnings);
    ma::write_market_access_csv(config.out_dir / "market_access.csv", step.records,
                                config.alpha, config.provenance());
    for (const auto& w : warnings) std::cerr << "harbor: note: " << w << "\n";
    std::cout << "wrote " << (config.out_dir / "market_access.csv").string() << "\n";
    return 0;
}

int cmd_eventstudy(const RunConfig& config, const std::string& outcome,
                   const std::string& transform, const std::string& treatment, int bonferroni_m,
                   bool plot) {
    config.validate();
    std::filesystem::create_directories(config.out_dir);
    const geo::CostSurface surface = load_surface(config, config.alpha, config.raster);
    const MarketAccessStep step = run_market_access(config, surface, config.theta);
    const CensusJoin join = build_census_join(config, step);

    EventStudyRun run;
    run.spec_id = outcome + "_" + treatment + "_" + transform;
    run.outcome = outcome;
    run.transform = est::transform_from_name(transform);
    run.treatment = treatment;
    run.bonferroni_m = bonferroni_m;
    if (config.control_subgroup != "all") {
        run.unit_filter = subgroup_filter(config.control_subgroup, config, join);
        run.spec_id += "_" + config.control_subgroup;
    }
    const est::EventStudyFit fit = run_panel_event_study(join, run, config);
    write_coefficients_csv(config.out_dir / "coefficients.csv", fit_to_rows(run.spec_id, fit),
                           config.provenance());
    if (plot) {
        EventPlotOptions popts;
        popts.title = run.spec_id;
        if (bonferroni_m > 1) popts.ci_z = est::bonferroni_critical_z(bonferroni_m);
        write_event_study_svg(config.out_dir / (run.spec_id + ".svg"), fit, popts);
    }
    std::cout << "wrote " << (config.out_dir / "coefficients.csv").string() << "\n";
    return 0;
}

int cmd_ppml(const RunConfig& config) {
    config.validate(false);
    std::filesystem::create_directories(config.out_dir);
    std::vector<std::string> warnings;
    const auto rows = run_trade_regressions(config, &warnings);
    write_coefficients_csv(config.out_dir / "trade_coefficients.csv", rows,
                           config.provenance());
    for (const auto& w : warnings) std::cerr << "harbor: note: " << w << "\n";
    std::cout << "wrote " << (config.out_dir / "trade_coefficients.csv").string() << "\n";
    return 0;
}

int cmd_arch(const RunConfig& config, const std::string& kind_name,
             const std::string& treatment) {
    config.validate();
    std::filesystem::create_directories(config.out_dir);
    const geo::CostSurface surface = load_surface(config, config.alpha, config.raster);
    std::vector<std::string> warnings;
    const MarketAccessStep step = run_market_access(config, surface, config.theta, &warnings);

    std::vector<std::string> parish_ids;
    std::vector<double> treat;
    std::map<std::string, double> dlm;
    for (const auto& r : step.records) {
        if (!r.unreachable) dlm[r.parish_id] = r.delta_log_ma;
    }
    for (const auto& p : step.parishes) {
        const auto it = dlm.find(p.id);
        if (it == dlm.end()) continue;
        parish_ids.push_back(p.id);
        treat.push_back(treatment == "dummy" ? (p.region == ma::Region::West ? 1.0 : 0.0)
                                             : it->second);
    }

    const auto polygons = geo::read_geojson_polygons(config.parish_polygons);
    const arch::DatingModel model = arch::dating_model_from_name(config.dating_model);
    const auto findings =
        arch::read_findings_csv(config.findings, polygons, model, {}, &warnings);
    const arch::FindingKind kind = arch::finding_kind_from_name(kind_name);
    std::set<std::string> known(parish_ids.begin(), parish_ids.end());
    std::vector<arch::FindingRecord> subset;
    for (const auto& f : findings) {
        if (f.kind == kind && known.count(f.parish_id)) subset.push_back(f);
    }

    arch::ActivityConfig acfg;
    acfg.replicates = config.replicates;
    acfg.window_halfwidth = config.window;
    acfg.prior_c = config.prior_c;
    acfg.seed = config.seed;
    acfg.threads = config.threads;
    const arch::ActivityPanel panel = arch::monte_carlo_panel(subset, parish_ids, acfg);
    arch::write_activity_csv(config.out_dir / ("activity_" + kind_name + ".csv"), panel,
                             config.provenance());
    arch::write_replicate_cache(config.out_dir / ("replicates_" + kind_name + ".apsa"), panel);

    est::EventStudyFit fit = arch::arch_event_study(panel, treat, config.arch_reference_year);
    const arch::BootstrapResult boot = arch::clustered_bootstrap(
        panel, arch::make_event_study_estimator(treat, config.arch_reference_year),
        config.n_boot, config.seed, config.threads);
    arch::apply_bootstrap_se(fit, boot);
    write_coefficients_csv(config.out_dir / ("arch_" + kind_name + "_" + treatment + ".csv"),
                           fit_to_rows("arch_" + kind_name + "_" + treatment, fit),
                           config.provenance());
    for (const auto& w : warnings) std::cerr << "harbor: note: " << w << "\n";
    std::cout << "wrote "
              << (config.out_dir / ("arch_" + kind_name + "_" + treatment + ".csv")).string()
              << "\n";
    return 0;
}

int cmd_match(const RunConfig& config, const std::string& method) {
    config.validate();
    std::filesystem::create_directories(config.out_dir);
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
    std::vector<double> scores;
    if (method == "gbt") {
        matching::GbtOptions opts;
        opts.seed = config.seed;
        scores = matching::fit_propensity(X, y, opts).predict_all(X);
    } else if (method == "logistic") {
        scores = matching::predict_logistic(X, matching::fit_logistic_regression(X, y));
    } else {
        throw ConfigError("match: method must be gbt or logistic");
    }

    std::vector<std::string> treated_ids, control_ids;
    std::vector<double> treated_scores, control_scores;
    for (std::size_t i = 0; i < soil.rows.size(); ++i) {
        if (soil.rows[i].treated) {
            treated_ids.push_back(soil.rows[i].parish_id);
            treated_scores.push_back(scores[i]);
        } else {
            control_ids.push_back(soil.rows[i].parish_id);
            control_scores.push_back(scores[i]);
        }
    }
    const matching::MatchResult result = matching::greedy_match(
        treated_ids, treated_scores, control_ids, control_scores, config.seed);
    matching::write_matches_csv(config.out_dir / "matches.csv", result, config.provenance());
    const matching::BalanceReport report =
        matching::balance_report(result, treated_scores, control_scores);
    matching::write_balance_csv(config.out_dir / "balance.csv", report, config.provenance());
    std::cout << "wrote " << (config.out_dir / "matches.csv").string() << " ("
              << result.pairs.size() << " pairs, " << result.unmatched_treated.size()
              << " unmatched)\n";
    return 0;
}

int cmd_synth(const RunConfig& config, int n_parishes, int n_treated, double beta_1901) {
    if (!config.seed_set) throw ConfigError("synth: seed is mandatory");
    SynthParams params;
    params.seed = config.seed;
    params.n_parishes = n_parishes;
    params.n_treated = n_treated;
    params.census_beta = {{1901, beta_1901}};
    const SyntheticWorld world = generate_synthetic_world(params, config.out_dir);
    std::cout << "wrote synthetic world in " << world.dir.string() << "\n"
              << "run: harbor pipeline --config " << world.config_file.string() << "\n";
    return 0;
}

} // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"market access, panel estimation and activity panels toolkit"};
    app.require_subcommand(1);

    CommonFlags flags;
    double src_x = 0.0, src_y = 0.0;
    std::string outcome = "population", transform = "log", treatment = "dummy";
    std::string kind = "coins", method = "gbt";
    int bonferroni_m = 0;
    bool plot = false;
    int n_parishes = 200, n_treated = 40;
    double beta_1901 = 0.25;

    auto* costdist = app.add_subcommand("costdist", "least-cost distances from a source point");
    add_common(costdist, flags);
    costdist->add_option("--source-x", src_x)->required();
    costdist->add_option("--source-y", src_y)->required();

    auto* mac = app.add_subcommand("ma", "market access per parish");
    add_common(mac, flags);

    auto* es = app.add_subcommand("eventstudy", "two-way fixed-effects event study");
    add_common(es, flags);
    es->add_option("--outcome", outcome, "panel column");
    es->add_option("--transform", transform, "log|log1p|arcsinh|extensive|intensive|identity");
    es->add_option("--treatment", treatment, "dummy|ma|three_region");
    es->add_option("--bonferroni-m", bonferroni_m, "multiplicity for corrections");
    es->add_flag("--plot", plot, "emit an SVG event plot");

    auto* ppml = app.add_subcommand("ppml", "trade regressions (PPML + OLS variants)");
    add_common(ppml, flags);

    auto* arch = app.add_subcommand("arch", "activity panel + event study with bootstrap");
    add_common(arch, flags);
    arch->add_option("--kind", kind, "coins|buildings");
    arch->add_option("--treatment", treatment, "dummy|ma");

    auto* match = app.add_subcommand("match", "soil propensity scores + greedy matching");
    add_common(match, flags);
    match->add_option("--method", method, "gbt|logistic");

    auto* pipeline = app.add_subcommand("pipeline", "full run: MA, panels, estimations");
    add_common(pipeline, flags);
    pipeline->add_flag("--multiverse", "sweep theta/alpha grids and control subgroups");
    pipeline->add_flag("--plots", "emit SVG event plots");

    auto* synth = app.add_subcommand("synth", "generate a synthetic world with ground truth");
    add_common(synth, flags);
    synth->add_option("--parishes-n", n_parishes, "number of parishes");
    synth->add_option("--treated-n", n_treated, "number of treated parishes");
    synth->add_option("--beta-1901", beta_1901, "injected census effect");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        RunConfig config = make_config(flags);
        if (costdist->parsed()) return cmd_costdist(config, src_x, src_y);
        if (mac->parsed()) return cmd_ma(config);
        if (es->parsed()) {
            return cmd_eventstudy(config, outcome, transform, treatment, bonferroni_m, plot);
        }
        if (ppml->parsed()) return cmd_ppml(config);
        if (arch->parsed()) return cmd_arch(config, kind, treatment);
        if (match->parsed()) return cmd_match(config, method);
        if (pipeline->parsed()) {
            if (pipeline->count("--multiverse")) config.multiverse = true;
            if (pipeline->count("--plots")) config.emit_plots = true;
            return cmd_pipeline(config);
        }
        if (synth->parsed()) return cmd_synth(config, n_parishes, n_treated, beta_1901);
        throw ConfigError("no subcommand");
    } catch (const ConfigError& e) {
        std::cerr << "harbor: error[config]: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "harbor: error[data]: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "harbor: error[numeric]: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "harbor: error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace harbor::cli
