#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "harbor/arch/activity.hpp"
#include "harbor/arch/bootstrap.hpp"
#include "harbor/arch/findings.hpp"
#include "harbor/util/errors.hpp"
#include "harbor/util/stats.hpp"

#include "testutil/fixtures.hpp"

#include <cmath>
#include <numeric>

using namespace harbor;
using namespace harbor::arch;

namespace {

FindingRecord finding(const std::string& id, const std::string& parish, int ymin, int ymax,
                      DatingModel model = DatingModel::Uniform) {
    return {id, parish, FindingKind::Coin, ymin, ymax, model};
}

ActivityConfig config_for(std::uint64_t seed, int B = 1000) {
    ActivityConfig cfg;
    cfg.seed = seed;
    cfg.replicates = B;
    return cfg;
}

} // namespace

TEST_CASE("uniform dating probability") {
    const FindingRecord f = finding("f1", "p", 1000, 1099);
    CHECK(dating_probability(f, 1050) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(dating_probability(f, 999) == 0.0);
    CHECK(dating_probability(f, 1100) == 0.0);
}

TEST_CASE("point dating is a unit mass") {
    const FindingRecord f = finding("f1", "p", 1200, 1200);
    CHECK(dating_probability(f, 1200) == 1.0);
    CHECK(dating_probability(f, 1201) == 0.0);
}

TEST_CASE("normal dating mass matches the CDF-difference oracle") {
    const FindingRecord f = finding("f1", "p", 1000, 1099, DatingModel::Normal);
    const DatingDistribution dist = make_dating_distribution(f);

    double mass = 0.0;
    for (int t = 1025; t <= 1074; ++t) mass += dist.pmf_at(t);

    const double mu = 1049.5;
    const double sigma = 99.0 / (2.0 * 1.96);
    const double oracle = normal_cdf((1074.5 - mu) / sigma) - normal_cdf((1024.5 - mu) / sigma);
    CHECK(fixtures::near_abs(mass, oracle, 1e-6));

    double total = 0.0;
    for (std::size_t i = 0; i < dist.pmf.size(); ++i) total += dist.pmf[i];
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empty parish stays at zero probability") {
    const std::vector<std::string> parishes = {"a", "b"};
    const std::vector<FindingRecord> fs = {finding("f1", "a", 1000, 1099)};
    const ActivityPanel panel = monte_carlo_panel(fs, parishes, config_for(1, 200));
    for (int g = 0; g < panel.n_years(); ++g) {
        CHECK(panel.probability(1, g) == 0.0);
    }
}

TEST_CASE("single-finding exact window probability and MC bound for 20 seeds") {
    // Uniform on [1000,1099]: 50 of 100 years lie within 25 of grid year 1025.
    const std::vector<std::string> parishes = {"a"};
    const std::vector<FindingRecord> fs = {finding("f1", "a", 1000, 1099)};
    const double exact = exact_window_probability(fs, 1025, 25);
    CHECK(exact == doctest::Approx(0.5).epsilon(1e-12));

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        // Shift the grid so year 1025 is an actual grid year.
        ActivityConfig cfg = config_for(seed, 1000);
        cfg.year_start = 975;
        const ActivityPanel panel = monte_carlo_panel(fs, parishes, cfg);
        const int g1025 = (1025 - cfg.year_start) / 50;
        CHECK(panel.years()[g1025] == 1025);
        const double bound = 3.0 * std::sqrt(exact * (1.0 - exact) / 1000.0);
        CHECK(bound == doctest::Approx(0.0474).epsilon(1e-2));
        CHECK(std::fabs(panel.probability(0, g1025) - exact) <= bound);

        // Grid year 1075: window [1050,1099] covers 50 of 100 years too.
        const double exact_1075 = exact_window_probability(fs, 1075, 25);
        CHECK(exact_1075 == doctest::Approx(0.5).epsilon(1e-12));
        const int g1075 = (1075 - cfg.year_start) / 50;
        CHECK(std::fabs(panel.probability(0, g1075) - exact_1075) <= bound);
    }
}

TEST_CASE("two findings combine by the product formula") {
    const std::vector<std::string> parishes = {"a"};
    const std::vector<FindingRecord> fs = {finding("f1", "a", 1000, 1099),
                                           finding("f2", "a", 990, 1089)};
    // p1 at grid 1050: [1025,1074] on [1000,1099] -> 50/100.
    // p2 at grid 1050: [1025,1074] on [990,1089] -> 50/100.
    const double p1 = 50.0 / 100.0;
    const double p2 = 50.0 / 100.0;
    const double expect = 1.0 - (1.0 - p1) * (1.0 - p2);
    const double exact = exact_window_probability(fs, 1050, 25);
    CHECK(exact == doctest::Approx(expect).epsilon(1e-12));

    const int g = (1050 - 750) / 50;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const ActivityPanel panel = monte_carlo_panel(fs, parishes, config_for(seed, 1000));
        const double bound = 3.0 * std::sqrt(exact * (1.0 - exact) / 1000.0);
        CHECK(std::fabs(panel.probability(0, g) - exact) <= bound);
    }
}

TEST_CASE("point-dated findings are deterministic across replicates") {
    const std::vector<std::string> parishes = {"a"};
    const std::vector<FindingRecord> fs = {finding("f1", "a", 1200, 1200)};
    const ActivityPanel panel = monte_carlo_panel(fs, parishes, config_for(9, 64));
    const int g1200 = (1200 - 750) / 50;
    CHECK(panel.probability(0, g1200) == 1.0);
    for (int b = 0; b < panel.n_replicates(); ++b) {
        CHECK(panel.replicate_bit(b, 0, g1200));
    }
    // 1225 is exactly 25 away from both 1200 and 1250 grid years.
    const int g1250 = (1250 - 750) / 50;
    CHECK(panel.probability(0, g1250) == 0.0);
}

TEST_CASE("same seed gives identical panels for any thread count") {
    const std::vector<std::string> parishes = {"a", "b", "c"};
    std::vector<FindingRecord> fs;
    for (int i = 0; i < 12; ++i) {
        fs.push_back(finding("f" + std::to_string(i), parishes[i % 3], 800 + 13 * i,
                             900 + 17 * i));
    }
    ActivityConfig c1 = config_for(77, 256);
    c1.threads = 1;
    ActivityConfig c4 = config_for(77, 256);
    c4.threads = 4;
    const ActivityPanel p1 = monte_carlo_panel(fs, parishes, c1);
    const ActivityPanel p4 = monte_carlo_panel(fs, parishes, c4);
    CHECK(p1.words() == p4.words());
    CHECK(p1.probabilities() == p4.probabilities());

    // Input order does not matter either: findings are ordered by id.
    auto reversed = fs;
    std::reverse(reversed.begin(), reversed.end());
    const ActivityPanel p2 = monte_carlo_panel(reversed, parishes, c1);
    CHECK(p1.words() == p2.words());
}

TEST_CASE("widening the window never decreases probabilities on a shared seed") {
    const std::vector<std::string> parishes = {"a", "b"};
    std::vector<FindingRecord> fs = {finding("f1", "a", 900, 1100),
                                     finding("f2", "b", 1200, 1400),
                                     finding("f3", "a", 1000, 1000)};
    ActivityConfig narrow = config_for(5, 300);
    narrow.window_halfwidth = 25;
    ActivityConfig wide = config_for(5, 300);
    wide.window_halfwidth = 40;
    const ActivityPanel pn = monte_carlo_panel(fs, parishes, narrow);
    const ActivityPanel pw = monte_carlo_panel(fs, parishes, wide);
    for (int p = 0; p < pn.n_parishes(); ++p) {
        for (int g = 0; g < pn.n_years(); ++g) {
            CHECK(pw.probability(p, g) >= pn.probability(p, g) - 1e-15);
        }
    }
}

TEST_CASE("replicate cache round trip") {
    const auto dir = fixtures::temp_dir("arch");
    const std::vector<std::string> parishes = {"a", "b"};
    const std::vector<FindingRecord> fs = {finding("f1", "a", 1000, 1099)};
    ActivityConfig cfg = config_for(3, 128);
    cfg.prior_c = 0.8;
    const ActivityPanel panel = monte_carlo_panel(fs, parishes, cfg);
    write_replicate_cache(dir / "panel.apsa", panel);
    const ActivityPanel loaded = read_replicate_cache(dir / "panel.apsa");
    CHECK(loaded.n_replicates() == panel.n_replicates());
    CHECK(loaded.parish_ids() == panel.parish_ids());
    CHECK(loaded.years() == panel.years());
    CHECK(loaded.words() == panel.words());
    CHECK(loaded.probabilities() == panel.probabilities());
    CHECK(loaded.prior_c() == panel.prior_c());

    fixtures::write_file(dir / "junk.apsa", "not a cache");
    CHECK_THROWS_AS(read_replicate_cache(dir / "junk.apsa"), DataError);
}

TEST_CASE("arch event study: constant outcome gives all-zero coefficients") {
    ActivityPanel panel({"a", "b", "c", "d"}, {1000, 1050, 1100}, 4, 1.0);
    for (int b = 0; b < 4; ++b) {
        for (int p = 0; p < 4; ++p) {
            for (int g = 0; g < 3; ++g) panel.set_replicate_bit(b, p, g);
        }
    }
    panel.finalize();
    const std::vector<double> treat = {1.0, 1.0, 0.0, 0.0};
    const est::EventStudyFit fit = arch_event_study(panel, treat, 1000);
    for (const auto& term : fit.terms) {
        CHECK(fixtures::near_abs(term.beta, 0.0, 1e-12));
    }
}

TEST_CASE("clustered bootstrap: constant panel has zero SE") {
    ActivityPanel panel({"a", "b", "c"}, {1000, 1050}, 8, 1.0);
    for (int b = 0; b < 8; ++b) {
        for (int p = 0; p < 3; ++p) panel.set_replicate_bit(b, p, 0);
    }
    panel.finalize();
    const PanelEstimator mean_estimator = [](const ResampledPanel& rp) {
        double sum = 0.0;
        for (double v : rp.probability) sum += v;
        return std::vector<double>{sum / static_cast<double>(rp.probability.size())};
    };
    const BootstrapResult boot = clustered_bootstrap(panel, mean_estimator, 50, 1);
    CHECK(boot.se[0] == 0.0);
    CHECK_THROWS_AS(clustered_bootstrap(panel, mean_estimator, 1, 1), ConfigError);
}

TEST_CASE("bootstrap SE of the sample mean tracks the analytic clustered SE") {
    // Deterministic bits identical across replicates: replicate resampling
    // contributes nothing and the bootstrap variance is pure parish noise.
    const int P = 30, G = 4, B = 20;
    std::vector<std::string> ids;
    for (int p = 0; p < P; ++p) ids.push_back("p" + std::to_string(p));
    std::vector<int> years = {900, 950, 1000, 1050};
    ActivityPanel panel(ids, years, B, 1.0);
    for (int p = 0; p < P; ++p) {
        const int on_years = p % (G + 1); // parish mean varies 0..1
        for (int b = 0; b < B; ++b) {
            for (int g = 0; g < on_years; ++g) panel.set_replicate_bit(b, p, g);
        }
    }
    panel.finalize();

    std::vector<double> parish_mean(P);
    for (int p = 0; p < P; ++p) {
        double m = 0.0;
        for (int g = 0; g < G; ++g) m += panel.probability(p, g);
        parish_mean[p] = m / G;
    }
    const double grand = mean(parish_mean);
    double var_emp = 0.0;
    for (double m : parish_mean) var_emp += (m - grand) * (m - grand);
    var_emp /= P; // empirical (not n-1) variance: resampling distribution
    const double analytic_se = std::sqrt(var_emp / P);

    const PanelEstimator mean_estimator = [](const ResampledPanel& rp) {
        double sum = 0.0;
        for (double v : rp.probability) sum += v;
        return std::vector<double>{sum / static_cast<double>(rp.probability.size())};
    };

    double se_sum = 0.0;
    const int reps = 50;
    for (int rep = 0; rep < reps; ++rep) {
        const BootstrapResult boot =
            clustered_bootstrap(panel, mean_estimator, 100, 1000 + rep);
        se_sum += boot.se[0];
    }
    const double se_avg = se_sum / reps;
    CHECK(std::fabs(se_avg - analytic_se) / analytic_se < 0.15);
}

TEST_CASE("bootstrap is bit-identical across runs and thread counts") {
    const std::vector<std::string> parishes = {"a", "b", "c", "d", "e", "f"};
    std::vector<FindingRecord> fs;
    for (int i = 0; i < 10; ++i) {
        fs.push_back(finding("f" + std::to_string(i), parishes[i % 6], 900 + i * 37,
                             1000 + i * 41));
    }
    const ActivityPanel panel = monte_carlo_panel(fs, parishes, config_for(2, 200));
    const std::vector<double> treat = {1.0, 1.0, 1.0, 0.0, 0.0, 0.0};
    const PanelEstimator est = make_event_study_estimator(treat, 1000);
    const BootstrapResult b1 = clustered_bootstrap(panel, est, 40, 99, 1);
    const BootstrapResult b2 = clustered_bootstrap(panel, est, 40, 99, 4);
    const BootstrapResult b3 = clustered_bootstrap(panel, est, 40, 99, 1);
    CHECK(b1.draws == b2.draws);
    CHECK(b1.draws == b3.draws);
    CHECK(b1.se == b2.se);
}

TEST_CASE("prior scaling: beta and SE scale linearly, t-statistics unchanged") {
    // Bernoulli replicate bits with a built-in treated decline.
    const int P = 40, B = 300;
    std::vector<std::string> ids;
    std::vector<double> treat(P, 0.0);
    for (int p = 0; p < P; ++p) {
        ids.push_back("p" + std::to_string(p));
        if (p < 10) treat[p] = 1.0;
    }
    std::vector<int> years;
    for (int y = 750; y <= 1500; y += 50) years.push_back(y);

    ActivityPanel panel(ids, years, B, 1.0);
    Rng rng(4242);
    for (int b = 0; b < B; ++b) {
        for (int p = 0; p < P; ++p) {
            for (int g = 0; g < static_cast<int>(years.size()); ++g) {
                double prob = 0.5;
                if (treat[p] > 0.0 && years[g] >= 1250) prob = 0.45;
                if (rng.next_unit() < prob) panel.set_replicate_bit(b, p, g);
            }
        }
    }
    panel.finalize();

    const est::EventStudyFit fit1 = arch_event_study(panel, treat, 1000);

    ActivityPanel scaled = panel;
    scaled.set_prior_c(0.37);
    const est::EventStudyFit fit2 = arch_event_study(scaled, treat, 1000);

    for (std::size_t i = 0; i < fit1.terms.size(); ++i) {
        if (fit1.terms[i].is_reference) continue;
        const auto& t1 = fit1.terms[i];
        const auto& t2 = fit2.terms[i];
        CHECK(std::fabs(t2.beta - 0.37 * t1.beta) <= 1e-8 * std::max(1.0, std::fabs(t1.beta)));
        CHECK(std::fabs(t2.se - 0.37 * t1.se) <= 1e-8 * std::max(1.0, t1.se));
        if (t1.se > 0.0) {
            CHECK(std::fabs(t2.beta / t2.se - t1.beta / t1.se) < 1e-8);
        }
    }

    // Bootstrap SEs scale the same way on a shared seed.
    const BootstrapResult boot1 =
        clustered_bootstrap(panel, make_event_study_estimator(treat, 1000), 30, 7);
    const BootstrapResult boot2 =
        clustered_bootstrap(scaled, make_event_study_estimator(treat, 1000), 30, 7);
    for (std::size_t c = 0; c < boot1.se.size(); ++c) {
        CHECK(std::fabs(boot2.se[c] - 0.37 * boot1.se[c]) <= 1e-8 * std::max(1.0, boot1.se[c]));
    }
}

TEST_CASE("injected post-1200 decline is recovered within two bootstrap SEs") {
    const int P = 60, B = 500;
    std::vector<std::string> ids;
    std::vector<double> treat(P, 0.0);
    for (int p = 0; p < P; ++p) {
        ids.push_back("p" + std::to_string(p));
        if (p < 12) treat[p] = 1.0;
    }
    std::vector<int> years;
    for (int y = 750; y <= 1500; y += 50) years.push_back(y);

    ActivityPanel panel(ids, years, B, 1.0);
    Rng rng(2025);
    for (int b = 0; b < B; ++b) {
        for (int p = 0; p < P; ++p) {
            for (int g = 0; g < static_cast<int>(years.size()); ++g) {
                double prob = 0.5;
                if (treat[p] > 0.0 && years[g] > 1200) prob = 0.49;
                if (rng.next_unit() < prob) panel.set_replicate_bit(b, p, g);
            }
        }
    }
    panel.finalize();

    est::EventStudyFit fit = arch_event_study(panel, treat, 1000);
    const BootstrapResult boot =
        clustered_bootstrap(panel, make_event_study_estimator(treat, 1000), 150, 11);
    apply_bootstrap_se(fit, boot);

    const auto& t1350 = fit.term(1350);
    CHECK(std::fabs(t1350.beta - (-0.01)) <= 2.0 * t1350.se);
    const auto& t950 = fit.term(950);
    CHECK(std::fabs(t950.beta) <= 2.0 * t950.se);
}

TEST_CASE("findings csv resolves parishes by polygon and filters the period") {
    const auto dir = fixtures::temp_dir("arch");
    fixtures::write_file(dir / "parishes.geojson", R"({
      "type": "FeatureCollection",
      "features": [
        {"type": "Feature", "properties": {"id": "west_parish"},
         "geometry": {"type": "Polygon",
                      "coordinates": [[[0,0],[10,0],[10,10],[0,10],[0,0]]]}},
        {"type": "Feature", "properties": {"id": "east_parish"},
         "geometry": {"type": "Polygon",
                      "coordinates": [[[10,0],[20,0],[20,10],[10,10],[10,0]]]}}
      ]})");
    fixtures::write_file(dir / "findings.csv",
                         "finding_id,lon,lat,kind,year_min,year_max\n"
                         "f1,5,5,coin,1000,1099\n"
                         "f2,15,5,building,1200,1300\n"
                         "f3,25,5,coin,1000,1100\n"     // outside all polygons
                         "f4,5,5,coin,600,800\n");      // outside the period
    const auto polys = geo::read_geojson_polygons(dir / "parishes.geojson");
    std::vector<std::string> warnings;
    const auto fs = read_findings_csv(dir / "findings.csv", polys, DatingModel::Uniform, {},
                                      &warnings);
    REQUIRE(fs.size() == 2);
    CHECK(fs[0].parish_id == "west_parish");
    CHECK(fs[0].kind == FindingKind::Coin);
    CHECK(fs[1].parish_id == "east_parish");
    CHECK(fs[1].kind == FindingKind::Building);
    CHECK(warnings.size() == 2);
}

TEST_CASE("monte_carlo_panel rejects a nonpositive replicate count") {
    const std::vector<std::string> parishes = {"a"};
    ActivityConfig cfg;
    cfg.replicates = 0;
    cfg.seed = 1;
    CHECK_THROWS_AS(monte_carlo_panel({}, parishes, cfg), ConfigError);
}

TEST_CASE("empty finding set yields a valid all-zero panel") {
    const std::vector<std::string> parishes = {"a", "b"};
    ActivityConfig cfg;
    cfg.replicates = 8;
    cfg.seed = 3;
    const ActivityPanel panel = monte_carlo_panel({}, parishes, cfg);
    for (int p = 0; p < panel.n_parishes(); ++p) {
        for (int g = 0; g < panel.n_years(); ++g) CHECK(panel.probability(p, g) == 0.0);
    }
}

TEST_CASE("MC estimates track exact probabilities on every cell (1-5 findings)") {
    // Parishes with one to five findings; moderate spans keep in-window
    // probabilities away from the degenerate corners.
    std::vector<std::string> parishes;
    std::vector<FindingRecord> fs;
    int id = 0;
    for (int k = 1; k <= 5; ++k) {
        const std::string pid = "p" + std::to_string(k);
        parishes.push_back(pid);
        for (int j = 0; j < k; ++j) {
            const int lo = 800 + 90 * j + 15 * k;
            const int hi = lo + 120 + 30 * j;
            fs.push_back(finding("f" + std::to_string(id++), pid, lo, std::min(hi, 1500)));
        }
    }
    const int B = 1000;
    const ActivityPanel panel = monte_carlo_panel(fs, parishes, config_for(6, B));

    std::map<std::string, std::vector<FindingRecord>> by_parish;
    for (const auto& f : fs) by_parish[f.parish_id].push_back(f);
    for (int p = 0; p < panel.n_parishes(); ++p) {
        const auto& group = by_parish.at(parishes[p]);
        for (int g = 0; g < panel.n_years(); ++g) {
            const double exact =
                exact_window_probability(group, panel.years()[g], 25);
            // 3-sigma binomial bound with a small-count floor for the tails.
            const double bound =
                std::max(3.0 * std::sqrt(exact * (1.0 - exact) / B), 5.0 / B);
            CHECK(std::fabs(panel.probability(p, g) - exact) <= bound);
        }
    }
}

TEST_CASE("normal dating model flows through the Monte Carlo panel") {
    const std::vector<std::string> parishes = {"a"};
    const std::vector<FindingRecord> fs = {
        finding("f1", "a", 1000, 1199, DatingModel::Normal)};
    const int B = 1000;
    const ActivityPanel panel = monte_carlo_panel(fs, parishes, config_for(12, B));
    for (int g = 0; g < panel.n_years(); ++g) {
        const double exact = exact_window_probability(fs, panel.years()[g], 25);
        const double bound = std::max(3.0 * std::sqrt(exact * (1.0 - exact) / B), 5.0 / B);
        CHECK(std::fabs(panel.probability(0, g) - exact) <= bound);
    }
    // The mode sits at the interval midpoint: year 1100 carries the most mass.
    const int g1100 = (1100 - 750) / 50;
    for (int g = 0; g < panel.n_years(); ++g) {
        CHECK(panel.probability(0, g1100) >= panel.probability(0, g) - 1e-12);
    }
}
