#ifndef HARBOR_MATCHING_GREEDY_HPP
#define HARBOR_MATCHING_GREEDY_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace harbor::matching {

struct MatchPair {
    std::string treated_id;
    std::string control_id;
    double score_treated = 0.0;
    double score_control = 0.0;

    double abs_delta() const { return std::abs(score_treated - score_control); }
};

struct MatchResult {
    std::vector<MatchPair> pairs;
    std::vector<std::string> unmatched_treated;
};

/// Greedy 1:1 nearest-propensity matching without replacement. Treated
/// units are visited in seeded random order; each takes the still-available
/// control with the smallest |score difference|, ties broken by the smaller
/// control id. Treated units left over once controls run out are reported
/// unmatched.
MatchResult greedy_match(std::span<const std::string> treated_ids,
                         std::span<const double> treated_scores,
                         std::span<const std::string> control_ids,
                         std::span<const double> control_scores, std::uint64_t seed);

struct GroupStats {
    double mean = 0.0;
    double sd = 0.0;
    int n = 0;
};

struct BalanceReport {
    GroupStats pre_treated, pre_control;
    GroupStats post_treated, post_control;
    double pre_smd = 0.0;  // standardized mean difference before matching
    double post_smd = 0.0; // after matching
    double mean_abs_delta = 0.0;
};

/// Pre- vs post-match propensity distributions. Pre uses every unit; post
/// uses the matched pairs only.
BalanceReport balance_report(const MatchResult& matched,
                             std::span<const double> treated_scores,
                             std::span<const double> control_scores);

void write_matches_csv(const std::filesystem::path& path, const MatchResult& result,
                       const std::string& comment);
void write_balance_csv(const std::filesystem::path& path, const BalanceReport& report,
                       const std::string& comment);

} // namespace harbor::matching

#endif
