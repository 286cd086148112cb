#include "harbor/arch/bootstrap.hpp"

#include "harbor/est/report.hpp"
#include "harbor/util/errors.hpp"
#include "harbor/util/parallel.hpp"
#include "harbor/util/rng.hpp"
#include "harbor/util/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace harbor::arch {

namespace {

// Success counts per (parish, year) cell over a replicate multiset.
std::vector<double> replicate_multiset_probability(const ActivityPanel& panel,
                                                   std::span<const int> replicate_count) {
    const int P = panel.n_parishes();
    const int G = panel.n_years();
    std::vector<double> counts(static_cast<std::size_t>(P) * G, 0.0);
    const std::size_t wpr = panel.words_per_replicate();
    const auto& words = panel.words();
    for (int b = 0; b < panel.n_replicates(); ++b) {
        const int cnt = replicate_count[b];
        if (cnt == 0) continue;
        const std::size_t base = static_cast<std::size_t>(b) * wpr;
        for (std::size_t w = 0; w < wpr; ++w) {
            std::uint64_t word = words[base + w];
            while (word) {
                const int bit = std::countr_zero(word);
                word &= word - 1;
                const std::size_t cell = w * 64 + static_cast<std::size_t>(bit);
                counts[cell] += cnt;
            }
        }
    }
    const double scale = panel.prior_c() / panel.n_replicates();
    for (double& v : counts) v *= scale;
    return counts;
}

std::pair<double, double> percentile_ci_of(std::vector<double> draws) {
    std::sort(draws.begin(), draws.end());
    const auto quantile = [&draws](double q) {
        const double pos = q * (static_cast<double>(draws.size()) - 1.0);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, draws.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return draws[lo] * (1.0 - frac) + draws[hi] * frac;
    };
    return {quantile(0.025), quantile(0.975)};
}

} // namespace

BootstrapResult clustered_bootstrap(const ActivityPanel& panel, const PanelEstimator& estimator,
                                    int n_boot, std::uint64_t seed, unsigned threads) {
    if (n_boot < 2) throw ConfigError("clustered_bootstrap: need at least 2 draws");
    const int P = panel.n_parishes();
    const int B = panel.n_replicates();
    if (P < 1 || B < 1) throw DataError("clustered_bootstrap: empty panel");

    BootstrapResult result;
    result.draws.assign(static_cast<std::size_t>(n_boot), {});

    parallel_for(static_cast<std::size_t>(n_boot), threads, [&](std::size_t d) {
        Rng rng = Rng::substream(seed, d);
        // Degenerate resamples (e.g. every drawn parish shares one treatment
        // value) make the estimator singular; such draws are redrawn from the
        // same substream, which stays deterministic for any thread count.
        for (int attempt = 0;; ++attempt) {
            // Parish clusters first, then Monte Carlo replicates.
            std::vector<int> parish_orig(P);
            for (int i = 0; i < P; ++i) {
                parish_orig[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(P)));
            }
            std::vector<int> replicate_count(B, 0);
            for (int i = 0; i < B; ++i) {
                replicate_count[rng.below(static_cast<std::uint64_t>(B))] += 1;
            }

            const std::vector<double> cell_prob =
                replicate_multiset_probability(panel, replicate_count);

            ResampledPanel resampled;
            resampled.parish_orig = std::move(parish_orig);
            resampled.years = &panel.years();
            const int G = panel.n_years();
            resampled.probability.resize(static_cast<std::size_t>(P) * G);
            for (int row = 0; row < P; ++row) {
                const int orig = resampled.parish_orig[row];
                std::copy_n(cell_prob.begin() + static_cast<std::size_t>(orig) * G, G,
                            resampled.probability.begin() + static_cast<std::size_t>(row) * G);
            }
            try {
                result.draws[d] = estimator(resampled);
                break;
            } catch (const NumericError&) {
                if (attempt >= 1000) throw;
            }
        }
    });

    const std::size_t n_coef = result.draws.front().size();
    for (const auto& d : result.draws) {
        if (d.size() != n_coef) {
            throw NumericError("clustered_bootstrap: estimator returned varying sizes");
        }
    }
    result.se.resize(n_coef);
    result.percentile_ci.resize(n_coef);
    std::vector<double> column(result.draws.size());
    for (std::size_t c = 0; c < n_coef; ++c) {
        for (std::size_t d = 0; d < result.draws.size(); ++d) column[d] = result.draws[d][c];
        result.se[c] = sample_sd(column);
        result.percentile_ci[c] = percentile_ci_of(column);
    }
    return result;
}

PanelEstimator make_event_study_estimator(std::vector<double> unit_treatment,
                                          int reference_year) {
    return [treat = std::move(unit_treatment), reference_year](const ResampledPanel& panel) {
        const int rows_n = static_cast<int>(panel.parish_orig.size());
        const int G = static_cast<int>(panel.years->size());
        std::vector<est::PanelRow> rows;
        rows.reserve(static_cast<std::size_t>(rows_n) * G);
        std::vector<double> row_treat(rows_n);
        for (int r = 0; r < rows_n; ++r) {
            row_treat[r] = treat[panel.parish_orig[r]];
            for (int g = 0; g < G; ++g) {
                rows.push_back({r, g, panel.at(r, g)});
            }
        }
        est::EventStudyOptions opts;
        opts.years = *panel.years;
        opts.reference_year = reference_year;
        const est::EventStudyFit fit = est::twfe_event_study(rows, rows_n, row_treat, opts);
        return fit.coefficients();
    };
}

est::EventStudyFit arch_event_study(const ActivityPanel& panel,
                                    std::span<const double> unit_treatment, int reference_year) {
    const int P = panel.n_parishes();
    const int G = panel.n_years();
    if (static_cast<int>(unit_treatment.size()) != P) {
        throw ConfigError("arch_event_study: treatment vector size mismatch");
    }
    std::vector<est::PanelRow> rows;
    rows.reserve(static_cast<std::size_t>(P) * G);
    for (int p = 0; p < P; ++p) {
        for (int g = 0; g < G; ++g) {
            rows.push_back({p, g, panel.probability(p, g)});
        }
    }
    est::EventStudyOptions opts;
    opts.years = panel.years();
    opts.reference_year = reference_year;
    return est::twfe_event_study(rows, P, unit_treatment, opts);
}

void apply_bootstrap_se(est::EventStudyFit& fit, const BootstrapResult& boot) {
    std::size_t k = 0;
    for (auto& term : fit.terms) {
        if (!term.is_reference) ++k;
    }
    if (k != boot.se.size()) {
        throw NumericError("apply_bootstrap_se: coefficient count mismatch");
    }
    const int m = static_cast<int>(k);
    k = 0;
    for (auto& term : fit.terms) {
        if (term.is_reference) continue;
        term.se = boot.se[k];
        term.p = term.se > 0.0 ? two_sided_p(term.beta / term.se) : (term.beta == 0.0 ? 1.0 : 0.0);
        term.p_bonferroni = est::bonferroni_adjust_p(term.p, m);
        ++k;
    }
}

} // namespace harbor::arch
