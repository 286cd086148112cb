// Acceptance suite: one line per criterion, nonzero exit when any gated
// criterion fails. Oracles are the independent reference implementations
// from tests/testutil/oracles.hpp.
#include "harbor/arch/activity.hpp"
#include "harbor/arch/bootstrap.hpp"
#include "harbor/est/event_study.hpp"
#include "harbor/est/linreg.hpp"
#include "harbor/est/ppml.hpp"
#include "harbor/est/report.hpp"
#include "harbor/geo/cost_distance.hpp"
#include "harbor/ma/market_access.hpp"
#include "harbor/matching/greedy.hpp"
#include "harbor/util/rng.hpp"

#include "testutil/fixtures.hpp"
#include "testutil/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>

using namespace harbor;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& what) {
    std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
    if (!ok) ++failures;
}

void report_skip(int criterion, const std::string& what) {
    std::printf("[SKIP] criterion %2d: %s\n", criterion, what.c_str());
}

// --------------------------------------------------------------- criterion 1
void dijkstra_oracle() {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const geo::CostSurface s = fixtures::random_surface(20, 20, seed);
        const geo::CellCoord source{static_cast<int>(seed % 20),
                                    static_cast<int>((seed * 7) % 20)};
        const geo::CostDistanceField field = geo::cost_distance(s, source);
        const std::vector<double> oracle = oracles::bellman_ford_distances(s, source);
        for (int r = 0; r < 20; ++r) {
            for (int c = 0; c < 20; ++c) {
                const double got = field.at({c, r});
                const double want = oracle[r * 20 + c];
                if (std::isinf(want) != std::isinf(got)) {
                    ok = false;
                } else if (!std::isinf(want)) {
                    worst = std::max(worst, std::fabs(got - want));
                }
            }
        }
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ok = ok && worst <= 1e-9 && elapsed < 5.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "Dijkstra equals Bellman-Ford on 50 random 20x20 grids "
                  "(max |diff| = %.2e, %.2fs)",
                  worst, elapsed);
    report(1, ok, buf);
}

// --------------------------------------------------------------- criterion 2
void ma_analytic() {
    const auto s = fixtures::make_surface(5, 1, {0, 0, 0, 0, 0});
    const ma::ParishSite parish{"p", {1.5, 0.5}, ma::Region::Reference};
    const std::vector<ma::Port> ports = {
        {"new", {2.5, 0.5}, false, true},
        {"old", {4.5, 0.5}, true, true},
    };
    const double ma_both =
        ma::market_access(parish, ports, -1.0, s); // both ports in reach
    const ma::MarketAccessRecord rec = ma::delta_log_ma(parish, ports, -1.0, s);
    const bool ok = ma_both == 0.75 && std::fabs(rec.delta_log_ma - std::log(3.0)) <= 1e-12;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "MA at distances {1,3} = %.6g (want exactly 0.75); "
                  "delta log MA = ln 3 %+.2e",
                  ma_both, rec.delta_log_ma - std::log(3.0));
    report(2, ok, buf);
}

// --------------------------------------------------------------- criterion 3
struct SimPanel {
    std::vector<est::PanelRow> rows;
    std::vector<double> treat;
    std::vector<int> units, times;
    std::vector<double> outcomes;
    est::EventStudyOptions opts;
};

SimPanel simulate_panel(std::uint64_t seed, int n_units, int n_treated, double beta_1901,
                        double sigma) {
    SimPanel p;
    p.opts.years = {1787, 1801, 1834, 1840, 1845, 1850, 1860, 1880, 1901};
    p.opts.reference_year = 1801;
    Rng rng(seed);
    std::vector<double> unit_fe(n_units), year_fe(9);
    for (auto& v : unit_fe) v = rng.normal(6.0, 0.5);
    for (auto& v : year_fe) v = rng.normal(0.0, 0.2);
    p.treat.assign(n_units, 0.0);
    for (int u = 0; u < n_treated; ++u) p.treat[u] = 1.0;
    for (int u = 0; u < n_units; ++u) {
        for (int t = 0; t < 9; ++t) {
            double y = unit_fe[u] + year_fe[t] + rng.normal(0.0, sigma);
            if (p.opts.years[t] == 1901) y += beta_1901 * p.treat[u];
            p.rows.push_back({u, t, y});
            p.units.push_back(u);
            p.times.push_back(t);
            p.outcomes.push_back(y);
        }
    }
    return p;
}

void twfe_oracle() {
    const SimPanel p = simulate_panel(1234, 200, 40, 0.25, 0.05);
    const est::EventStudyFit fit = est::twfe_event_study(p.rows, 200, p.treat, p.opts);
    oracles::DummyOlsInput in;
    in.unit = p.units;
    in.time = p.times;
    in.outcome = p.outcomes;
    in.unit_treatments = {p.treat};
    in.ref_time = 1;
    const Eigen::VectorXd oracle = oracles::dummy_expanded_ols(in, 200, 9);
    double worst = 0.0;
    const auto got = fit.coefficients();
    for (std::size_t i = 0; i < got.size(); ++i) {
        worst = std::max(worst, std::fabs(got[i] - oracle[static_cast<Eigen::Index>(i)]));
    }

    // 2x2 closed-form DiD.
    est::EventStudyOptions small_opts;
    small_opts.years = {1801, 1901};
    small_opts.reference_year = 1801;
    const std::vector<est::PanelRow> small = {
        {0, 0, 10.0}, {0, 1, 10.3}, {1, 0, 10.0}, {1, 1, 10.1}};
    const std::vector<double> small_treat = {1.0, 0.0};
    const est::EventStudyFit did = est::twfe_event_study(small, 2, small_treat, small_opts);
    const double did_err = std::fabs(did.term(1901).beta - 0.2);

    const bool ok = worst < 1e-8 && did_err < 1e-12;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "within-demeaned TWFE equals dummy-expanded OLS (max |diff| = %.2e); "
                  "2x2 DiD err = %.2e",
                  worst, did_err);
    report(3, ok, buf);
}

// --------------------------------------------------------------- criterion 4
void effect_recovery() {
    int hit_1901 = 0, hit_1787 = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const SimPanel p = simulate_panel(seed, 200, 40, 0.25, 0.05);
        const est::EventStudyFit fit = est::twfe_event_study(p.rows, 200, p.treat, p.opts);
        const auto& t1901 = fit.term(1901);
        const auto& t1787 = fit.term(1787);
        if (std::fabs(t1901.beta - 0.25) <= 2.0 * t1901.se) ++hit_1901;
        if (std::fabs(t1787.beta) <= 2.0 * t1787.se) ++hit_1787;
    }
    const bool ok = hit_1901 >= 95 && hit_1787 >= 95;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "injected beta_1901 = 0.25 recovered in %d/100 seeds; "
                  "beta_1787 covers 0 in %d/100 (need >= 95 each)",
                  hit_1901, hit_1787);
    report(4, ok, buf);
}

// --------------------------------------------------------------- criterion 5
void ppml_checks() {
    Eigen::MatrixXd X1 = Eigen::MatrixXd::Ones(3, 1);
    const std::vector<double> y1 = {1.0, 2.0, 3.0};
    const std::vector<int> c1 = {0, 1, 2};
    const est::PpmlFit intercept_fit = est::ppml(X1, y1, c1, 3, {"intercept"});
    const double intercept_err = std::fabs(intercept_fit.beta[0] - std::log(2.0));

    int hits_intercept = 0, hits_slope = 0;
    double worst_score = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        Rng rng(seed);
        const int n = 1000;
        Eigen::MatrixXd X(n, 2);
        std::vector<double> y(n);
        std::vector<int> cluster(n);
        for (int i = 0; i < n; ++i) {
            X(i, 0) = 1.0;
            X(i, 1) = rng.normal(0.0, 1.0);
            const double mu = std::exp(1.0 + 0.5 * X(i, 1));
            double u = rng.next_unit(), p = std::exp(-mu), cdf = p;
            int k = 0;
            while (u > cdf && k < 10000) {
                ++k;
                p *= mu / k;
                cdf += p;
            }
            y[i] = k;
            cluster[i] = i;
        }
        const est::PpmlFit fit = est::ppml(X, y, cluster, n, {"intercept", "x"});
        if (std::fabs(fit.beta[0] - 1.0) <= 2.0 * fit.se[0]) ++hits_intercept;
        if (std::fabs(fit.beta[1] - 0.5) <= 2.0 * fit.se[1]) ++hits_slope;
        Eigen::VectorXd score = Eigen::VectorXd::Zero(2);
        double scale = 0.0;
        for (int i = 0; i < n; ++i) {
            const double mu = std::exp(fit.beta[0] + fit.beta[1] * X(i, 1));
            score += X.row(i).transpose() * (y[i] - mu);
            scale += y[i];
        }
        worst_score = std::max(worst_score, score.cwiseAbs().maxCoeff() / std::max(1.0, scale));
    }
    const bool ok =
        intercept_err <= 1e-10 && hits_intercept >= 95 && hits_slope >= 95 && worst_score <= 1e-8;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "PPML intercept err = %.2e (<=1e-10); truth within 2 SE in %d/100 and "
                  "%d/100 seeds per coefficient; worst relative score = %.2e (<=1e-8)",
                  intercept_err, hits_intercept, hits_slope, worst_score);
    report(5, ok, buf);
}

// --------------------------------------------------------------- criterion 6
void cluster_se_oracle() {
    Eigen::MatrixXd X(6, 2);
    X << 1, 0.3, 1, -1.2, 1, 0.7, 1, 2.1, 1, -0.4, 1, 1.5;
    Eigen::VectorXd y(6);
    y << 0.2, -1.0, 1.1, 2.3, 0.1, 1.9;
    const std::vector<int> cluster = {0, 0, 1, 1, 2, 2};
    const Eigen::VectorXd beta = est::ols_solve(X, y);
    const Eigen::VectorXd resid_vec = y - X * beta;
    std::vector<double> resid(resid_vec.data(), resid_vec.data() + 6);
    const Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
    const est::FitInternals internals{X, xtx_inv, resid, cluster, 3, 2};
    const Eigen::VectorXd se = est::cluster_robust_se(internals);
    const Eigen::VectorXd oracle = oracles::naive_cluster_se(X, y, cluster, 2);
    const double worst = (se - oracle).cwiseAbs().maxCoeff();
    char buf[120];
    std::snprintf(buf, sizeof(buf), "CR1 SEs match the naive sandwich (max |diff| = %.2e)",
                  worst);
    report(6, worst <= 1e-10, buf);
}

// --------------------------------------------------------------- criterion 7
void arch_exact_case() {
    const std::vector<std::string> parish = {"a"};
    const arch::FindingRecord f1{"f1", "a", arch::FindingKind::Coin, 1000, 1099,
                                 arch::DatingModel::Uniform};
    const std::vector<arch::FindingRecord> one = {f1};
    const double exact = arch::exact_window_probability(one, 1025, 25);

    const arch::FindingRecord f2{"f2", "a", arch::FindingKind::Coin, 990, 1089,
                                 arch::DatingModel::Uniform};
    const std::vector<arch::FindingRecord> two = {f1, f2};
    const double p1 = arch::exact_window_probability({&f1, 1}, 1025, 25);
    const double p2 = arch::exact_window_probability({&f2, 1}, 1025, 25);
    const double exact_two_formula = 1.0 - (1.0 - p1) * (1.0 - p2);
    const double exact_two = arch::exact_window_probability(two, 1025, 25);

    const double bound = 3.0 * std::sqrt(0.25 / 1000.0); // ~0.0474
    bool mc_ok = true;
    double worst_one = 0.0, worst_two = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        arch::ActivityConfig cfg;
        cfg.year_start = 1025;
        cfg.year_end = 1025;
        cfg.replicates = 1000;
        cfg.seed = seed;
        const arch::ActivityPanel panel_one = arch::monte_carlo_panel(one, parish, cfg);
        worst_one = std::max(worst_one, std::fabs(panel_one.probability(0, 0) - exact));
        const arch::ActivityPanel panel_two = arch::monte_carlo_panel(two, parish, cfg);
        worst_two =
            std::max(worst_two, std::fabs(panel_two.probability(0, 0) - exact_two_formula));
    }
    mc_ok = worst_one <= bound && worst_two <= bound;
    const bool ok = std::fabs(exact - 0.5) <= 1e-12 &&
                    std::fabs(exact_two - exact_two_formula) <= 1e-12 && mc_ok;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "exact window probability = %.3f (want 0.5); product-formula agrees; "
                  "MC max errs %.4f / %.4f within 3-sigma bound %.4f over 20 seeds",
                  exact, worst_one, worst_two, bound);
    report(7, ok, buf);
}

// --------------------------------------------------------------- criterion 8
void prior_scaling() {
    const int P = 40, B = 300;
    std::vector<std::string> ids;
    std::vector<double> treat(P, 0.0);
    for (int p = 0; p < P; ++p) {
        ids.push_back("p" + std::to_string(p));
        if (p < 10) treat[p] = 1.0;
    }
    std::vector<int> years;
    for (int y = 750; y <= 1500; y += 50) years.push_back(y);
    arch::ActivityPanel panel(ids, years, B, 1.0);
    Rng rng(37);
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

    const est::EventStudyFit base = arch::arch_event_study(panel, treat, 1000);
    arch::ActivityPanel scaled = panel;
    scaled.set_prior_c(0.37);
    const est::EventStudyFit after = arch::arch_event_study(scaled, treat, 1000);

    double worst_rel = 0.0, worst_t = 0.0;
    for (std::size_t i = 0; i < base.terms.size(); ++i) {
        if (base.terms[i].is_reference) continue;
        const auto& b = base.terms[i];
        const auto& a = after.terms[i];
        if (b.beta != 0.0) {
            worst_rel = std::max(worst_rel, std::fabs(a.beta - 0.37 * b.beta) /
                                                std::fabs(0.37 * b.beta));
        }
        if (b.se > 0.0) {
            worst_rel = std::max(worst_rel,
                                 std::fabs(a.se - 0.37 * b.se) / std::fabs(0.37 * b.se));
            worst_t = std::max(worst_t, std::fabs(a.beta / a.se - b.beta / b.se));
        }
    }
    const bool ok = worst_rel < 1e-8 && worst_t < 1e-8;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "prior_c x0.37 scales beta and SE (worst rel err %.2e) and leaves "
                  "t-statistics unchanged (worst |diff| %.2e)",
                  worst_rel, worst_t);
    report(8, ok, buf);
}

// --------------------------------------------------------------- criterion 9
void arch_recovery() {
    const int P = 60, B = 500;
    std::vector<std::string> ids;
    std::vector<double> treat(P, 0.0);
    for (int p = 0; p < P; ++p) {
        ids.push_back("p" + std::to_string(p));
        if (p < 12) treat[p] = 1.0;
    }
    std::vector<int> years;
    for (int y = 750; y <= 1500; y += 50) years.push_back(y);
    arch::ActivityPanel panel(ids, years, B, 1.0);
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

    est::EventStudyFit fit = arch::arch_event_study(panel, treat, 1000);
    const arch::PanelEstimator estimator = arch::make_event_study_estimator(treat, 1000);
    const arch::BootstrapResult boot1 = arch::clustered_bootstrap(panel, estimator, 150, 11, 1);
    const arch::BootstrapResult bootN = arch::clustered_bootstrap(panel, estimator, 150, 11, 4);
    arch::apply_bootstrap_se(fit, boot1);
    const auto& t1350 = fit.term(1350);
    const bool recovered = std::fabs(t1350.beta - (-0.01)) <= 2.0 * t1350.se;
    const bool reproducible = boot1.draws == bootN.draws && boot1.se == bootN.se;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "post-1200 decline: beta_1350 = %.4f (truth -0.01, boot SE %.4f, within 2 SE: "
                  "%s); 1-vs-4-thread bootstrap bit-identical: %s",
                  t1350.beta, t1350.se, recovered ? "yes" : "no",
                  reproducible ? "yes" : "no");
    report(9, recovered && reproducible, buf);
}

// -------------------------------------------------------------- criterion 10
void matching_checks() {
    Rng gen(1000);
    std::vector<std::string> t_ids, c_ids;
    std::vector<double> t_scores, c_scores;
    for (int i = 0; i < 20; ++i) {
        t_ids.push_back("t" + std::to_string(i));
        t_scores.push_back(gen.next_unit());
    }
    for (int i = 0; i < 50; ++i) {
        c_ids.push_back("c" + std::to_string(i));
        c_scores.push_back(gen.next_unit());
    }
    bool replay_ok = true, injective_ok = true;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const matching::MatchResult got =
            matching::greedy_match(t_ids, t_scores, c_ids, c_scores, seed);
        std::vector<std::size_t> order(t_ids.size());
        std::iota(order.begin(), order.end(), 0);
        Rng order_rng(seed);
        order_rng.shuffle(order);
        const auto oracle =
            oracles::greedy_replay(order, t_ids, t_scores, c_ids, c_scores);
        std::map<std::string, std::string> got_map, want_map;
        std::set<std::string> used;
        for (const auto& p : got.pairs) {
            got_map[p.treated_id] = p.control_id;
            if (!used.insert(p.control_id).second) injective_ok = false;
        }
        for (const auto& p : oracle) want_map[p.treated] = p.control;
        if (got_map != want_map) replay_ok = false;
    }

    // Separable fixture: post-match SMD must beat pre-match SMD.
    Rng sep(8);
    std::vector<std::string> st_ids, sc_ids;
    std::vector<double> st_scores, sc_scores;
    for (int i = 0; i < 15; ++i) {
        st_ids.push_back("t" + std::to_string(i));
        st_scores.push_back(0.6 + 0.3 * sep.next_unit());
    }
    for (int i = 0; i < 60; ++i) {
        sc_ids.push_back("c" + std::to_string(i));
        sc_scores.push_back(sep.next_unit());
    }
    const matching::MatchResult matched =
        matching::greedy_match(st_ids, st_scores, sc_ids, sc_scores, 5);
    const matching::BalanceReport balance =
        matching::balance_report(matched, st_scores, sc_scores);
    const bool smd_ok = std::fabs(balance.post_smd) < std::fabs(balance.pre_smd);

    const bool ok = replay_ok && injective_ok && smd_ok;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "greedy replay oracle equal on 10 seeds: %s; injectivity: %s; "
                  "post-match |SMD| %.3f < pre-match %.3f: %s",
                  replay_ok ? "yes" : "no", injective_ok ? "yes" : "no", balance.post_smd,
                  balance.pre_smd, smd_ok ? "yes" : "no");
    report(10, ok, buf);
}

// -------------------------------------------------------------- criterion 11
void reporting_arithmetic() {
    const double pct = est::percent_from_logpoints(0.2364);
    const double bonf = est::bonferroni_adjust_p(0.01, 56);
    const bool ok = std::fabs(pct - 26.67) <= 0.01 && bonf == 0.56;
    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "percent_from_logpoints(0.2364) = %.4f%% (26.67 +- 0.01); "
                  "bonferroni p(0.01, 56) = %.4f (exactly 0.56)",
                  pct, bonf);
    report(11, ok, buf);
}

// -------------------------------------------------------------- criterion 12
void optional_replication() {
    const char* dir = std::getenv("HARBOR_REPLICATION_DIR");
    if (dir == nullptr || !std::filesystem::exists(dir)) {
        report_skip(12,
                    "optional replication of the published estimates needs the external "
                    "datasets (set HARBOR_REPLICATION_DIR; see README)");
        return;
    }
    report_skip(12, std::string("replication data found at ") + dir +
                        "; run `harbor pipeline` against it and compare coefficients.csv "
                        "to the published values (not gated)");
}

} // namespace

int main() {
    std::printf("acceptance suite\n================\n");
    dijkstra_oracle();
    ma_analytic();
    twfe_oracle();
    effect_recovery();
    ppml_checks();
    cluster_se_oracle();
    arch_exact_case();
    prior_scaling();
    arch_recovery();
    matching_checks();
    reporting_arithmetic();
    optional_replication();
    std::printf("================\n%s\n", failures == 0 ? "ALL GATED CRITERIA PASSED"
                                                        : "FAILURES PRESENT");
    return failures == 0 ? 0 : 1;
}
