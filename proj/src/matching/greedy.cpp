#include "harbor/matching/greedy.hpp"

#include "harbor/util/csv.hpp"
#include "harbor/util/errors.hpp"
#include "harbor/util/rng.hpp"
#include "harbor/util/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace harbor::matching {

MatchResult greedy_match(std::span<const std::string> treated_ids,
                         std::span<const double> treated_scores,
                         std::span<const std::string> control_ids,
                         std::span<const double> control_scores, std::uint64_t seed) {
    if (treated_ids.size() != treated_scores.size() ||
        control_ids.size() != control_scores.size()) {
        throw ConfigError("greedy_match: id/score size mismatch");
    }

    std::vector<std::size_t> order(treated_ids.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<char> control_used(control_ids.size(), 0);
    MatchResult result;
    for (std::size_t t : order) {
        std::size_t best = control_ids.size();
        double best_delta = 0.0;
        for (std::size_t c = 0; c < control_ids.size(); ++c) {
            if (control_used[c]) continue;
            const double delta = std::abs(treated_scores[t] - control_scores[c]);
            if (best == control_ids.size() || delta < best_delta ||
                (delta == best_delta && control_ids[c] < control_ids[best])) {
                best = c;
                best_delta = delta;
            }
        }
        if (best == control_ids.size()) {
            result.unmatched_treated.push_back(treated_ids[t]);
            continue;
        }
        control_used[best] = 1;
        result.pairs.push_back(
            {treated_ids[t], control_ids[best], treated_scores[t], control_scores[best]});
    }
    return result;
}

namespace {

GroupStats stats_of(std::span<const double> xs) {
    GroupStats s;
    s.n = static_cast<int>(xs.size());
    s.mean = mean(xs);
    s.sd = sample_sd(xs);
    return s;
}

double smd(const GroupStats& a, const GroupStats& b) {
    const double pooled = std::sqrt((a.sd * a.sd + b.sd * b.sd) / 2.0);
    if (pooled == 0.0) return 0.0;
    return (a.mean - b.mean) / pooled;
}

} // namespace

BalanceReport balance_report(const MatchResult& matched,
                             std::span<const double> treated_scores,
                             std::span<const double> control_scores) {
    BalanceReport report;
    report.pre_treated = stats_of(treated_scores);
    report.pre_control = stats_of(control_scores);
    report.pre_smd = smd(report.pre_treated, report.pre_control);

    std::vector<double> post_t, post_c;
    double delta_sum = 0.0;
    for (const MatchPair& pair : matched.pairs) {
        post_t.push_back(pair.score_treated);
        post_c.push_back(pair.score_control);
        delta_sum += pair.abs_delta();
    }
    report.post_treated = stats_of(post_t);
    report.post_control = stats_of(post_c);
    report.post_smd = smd(report.post_treated, report.post_control);
    report.mean_abs_delta = matched.pairs.empty() ? 0.0 : delta_sum / matched.pairs.size();
    return report;
}

void write_matches_csv(const std::filesystem::path& path, const MatchResult& result,
                       const std::string& comment) {
    CsvWriter w(path, comment);
    w.write_row({"treated_id", "control_id", "score_t", "score_c"});
    for (const MatchPair& pair : result.pairs) {
        w.write_row({pair.treated_id, pair.control_id, CsvWriter::fmt(pair.score_treated),
                     CsvWriter::fmt(pair.score_control)});
    }
    for (const std::string& id : result.unmatched_treated) {
        w.write_row({id, "", "", ""});
    }
}

void write_balance_csv(const std::filesystem::path& path, const BalanceReport& report,
                       const std::string& comment) {
    CsvWriter w(path, comment);
    w.write_row({"stage", "group", "mean", "sd", "n", "smd"});
    const auto row = [&w](const char* stage, const char* group, const GroupStats& s, double smd) {
        w.write_row({stage, group, CsvWriter::fmt(s.mean), CsvWriter::fmt(s.sd),
                     std::to_string(s.n), CsvWriter::fmt(smd)});
    };
    row("pre", "treated", report.pre_treated, report.pre_smd);
    row("pre", "control", report.pre_control, report.pre_smd);
    row("post", "treated", report.post_treated, report.post_smd);
    row("post", "control", report.post_control, report.post_smd);
}

} // namespace harbor::matching
