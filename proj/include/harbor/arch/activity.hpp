#ifndef HARBOR_ARCH_ACTIVITY_HPP
#define HARBOR_ARCH_ACTIVITY_HPP

#include "harbor/arch/findings.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace harbor::arch {

struct ActivityConfig {
    int year_start = 750;
    int year_end = 1500;
    int year_step = 50;
    /// Success at grid year g iff the drawn year t satisfies
    /// g - w <= t < g + w: a 2w-year window, so consecutive 50-year grid
    /// years tile the axis without overlap at the default w = 25.
    int window_halfwidth = 25;
    int replicates = 1000; // B
    double prior_c = 1.0;  // P({findings}) prior constant in (0, 1]
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

/// Parish x grid-year activity probabilities plus the Monte Carlo replicate
/// tensor they were averaged from. probability = success_count/B * prior_c.
class ActivityPanel {
public:
    ActivityPanel() = default;
    ActivityPanel(std::vector<std::string> parish_ids, std::vector<int> years, int replicates,
                  double prior_c);

    int n_parishes() const { return static_cast<int>(parish_ids_.size()); }
    int n_years() const { return static_cast<int>(years_.size()); }
    int n_replicates() const { return replicates_; }
    double prior_c() const { return prior_c_; }
    const std::vector<std::string>& parish_ids() const { return parish_ids_; }
    const std::vector<int>& years() const { return years_; }

    bool replicate_bit(int b, int p, int g) const {
        const std::size_t i = cell_index(p, g);
        return (bits_[b * words_per_replicate_ + (i >> 6)] >> (i & 63)) & 1u;
    }
    void set_replicate_bit(int b, int p, int g) {
        const std::size_t i = cell_index(p, g);
        bits_[b * words_per_replicate_ + (i >> 6)] |= std::uint64_t{1} << (i & 63);
    }
    std::size_t words_per_replicate() const { return words_per_replicate_; }

    /// Mean over replicates scaled by prior_c.
    double probability(int p, int g) const;
    /// Recomputes the cached probability matrix from the bit tensor.
    void finalize();
    const std::vector<double>& probabilities() const { return probability_; }

    /// Rescales the prior constant; probabilities scale linearly.
    void set_prior_c(double c);

    const std::vector<std::uint64_t>& words() const { return bits_; }
    std::vector<std::uint64_t>& words() { return bits_; }

private:
    std::size_t cell_index(int p, int g) const {
        return static_cast<std::size_t>(p) * years_.size() + g;
    }

    std::vector<std::string> parish_ids_;
    std::vector<int> years_;
    int replicates_ = 0;
    double prior_c_ = 1.0;
    /// Each replicate's (parish, year) bits start on a fresh word so that
    /// parallel replicate writers never share a word.
    std::size_t words_per_replicate_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<double> probability_; // parish-major
};

/// Monte Carlo activity panel: per replicate, one year draw per finding from
/// its dating distribution; a parish succeeds at a grid year when any of its
/// drawn years lands within the window. Replicates run on independent
/// substreams of (seed, replicate), so results are identical for any thread
/// count. Parishes without findings stay at probability zero.
ActivityPanel monte_carlo_panel(std::span<const FindingRecord> findings,
                                std::span<const std::string> parish_ids,
                                const ActivityConfig& config);

/// Exact P_i({findings}|t) by the product formula
/// 1 - prod_c (1 - P(t - w <= draw < t + w | finding_c)), scaled by prior_c.
/// Used as the analytic reference for the Monte Carlo estimate.
double exact_window_probability(std::span<const FindingRecord> parish_findings, int grid_year,
                                int window_halfwidth, double prior_c = 1.0);

/// Versioned binary cache of the replicate tensor:
/// magic "APSA", u32 version, u32 B, u32 P, u32 G, f64 prior_c,
/// i32 year[G], u16 id_len + bytes per parish id, then the bit tensor
/// row-major in (replicate, parish, year) order packed LSB-first into
/// little-endian u64 words, each replicate block padded to a word boundary.
void write_replicate_cache(const std::filesystem::path& path, const ActivityPanel& panel);
ActivityPanel read_replicate_cache(const std::filesystem::path& path);

void write_activity_csv(const std::filesystem::path& path, const ActivityPanel& panel,
                        const std::string& comment);

} // namespace harbor::arch

#endif
