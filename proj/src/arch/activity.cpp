#include "harbor/arch/activity.hpp"

#include "harbor/util/csv.hpp"
#include "harbor/util/errors.hpp"
#include "harbor/util/parallel.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>

namespace harbor::arch {

ActivityPanel::ActivityPanel(std::vector<std::string> parish_ids, std::vector<int> years,
                             int replicates, double prior_c)
    : parish_ids_(std::move(parish_ids)),
      years_(std::move(years)),
      replicates_(replicates),
      prior_c_(prior_c) {
    if (replicates_ < 1) throw ConfigError("activity panel: need at least one replicate");
    if (prior_c_ <= 0.0 || prior_c_ > 1.0) {
        throw ConfigError("activity panel: prior_c must lie in (0, 1]");
    }
    words_per_replicate_ = (parish_ids_.size() * years_.size() + 63) / 64;
    bits_.assign(static_cast<std::size_t>(replicates_) * words_per_replicate_, 0);
    probability_.assign(parish_ids_.size() * years_.size(), 0.0);
}

double ActivityPanel::probability(int p, int g) const {
    return probability_[static_cast<std::size_t>(p) * years_.size() + g];
}

void ActivityPanel::finalize() {
    const std::size_t ny = years_.size();
    for (std::size_t p = 0; p < parish_ids_.size(); ++p) {
        for (std::size_t g = 0; g < ny; ++g) {
            long successes = 0;
            for (int b = 0; b < replicates_; ++b) {
                successes += replicate_bit(b, static_cast<int>(p), static_cast<int>(g));
            }
            probability_[p * ny + g] =
                prior_c_ * static_cast<double>(successes) / replicates_;
        }
    }
}

void ActivityPanel::set_prior_c(double c) {
    if (c <= 0.0 || c > 1.0) throw ConfigError("activity panel: prior_c must lie in (0, 1]");
    const double scale = c / prior_c_;
    prior_c_ = c;
    for (double& v : probability_) v *= scale;
}

ActivityPanel monte_carlo_panel(std::span<const FindingRecord> findings,
                                std::span<const std::string> parish_ids,
                                const ActivityConfig& config) {
    if (config.replicates < 1) throw ConfigError("monte_carlo_panel: B must be >= 1");
    if (config.year_step <= 0 || config.year_end < config.year_start) {
        throw ConfigError("monte_carlo_panel: bad year grid");
    }
    std::vector<int> years;
    for (int y = config.year_start; y <= config.year_end; y += config.year_step) {
        years.push_back(y);
    }

    std::map<std::string, int> parish_index;
    for (std::size_t i = 0; i < parish_ids.size(); ++i) {
        parish_index[parish_ids[i]] = static_cast<int>(i);
    }

    // Deterministic finding order: sorted by id, independent of input order.
    std::vector<const FindingRecord*> ordered;
    ordered.reserve(findings.size());
    for (const FindingRecord& f : findings) {
        if (!parish_index.count(f.parish_id)) {
            throw DataError("monte_carlo_panel: finding '" + f.finding_id +
                            "' references unknown parish '" + f.parish_id + "'");
        }
        ordered.push_back(&f);
    }
    std::sort(ordered.begin(), ordered.end(), [](const FindingRecord* a, const FindingRecord* b) {
        return a->finding_id < b->finding_id;
    });
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        if (ordered[i]->finding_id == ordered[i - 1]->finding_id) {
            throw DataError("monte_carlo_panel: duplicate finding id '" +
                            ordered[i]->finding_id + "'");
        }
    }

    std::vector<DatingDistribution> dists;
    std::vector<int> finding_parish;
    dists.reserve(ordered.size());
    finding_parish.reserve(ordered.size());
    for (const FindingRecord* f : ordered) {
        dists.push_back(make_dating_distribution(*f));
        finding_parish.push_back(parish_index.at(f->parish_id));
    }

    ActivityPanel panel(std::vector<std::string>(parish_ids.begin(), parish_ids.end()),
                        std::move(years), config.replicates, config.prior_c);
    const auto& grid = panel.years();
    const int g0 = config.year_start;
    const int step = config.year_step;
    const int ng = static_cast<int>(grid.size());

    parallel_for(static_cast<std::size_t>(config.replicates), config.threads, [&](std::size_t b) {
        Rng rng = Rng::substream(config.seed, b);
        for (std::size_t c = 0; c < dists.size(); ++c) {
            const int t = dists[c].sample(rng);
            // Success at grid years g with g - w <= t < g + w, i.e.
            // g in (t - w, t + w]; with step = 2w the windows tile the axis.
            const int lo_year = t - config.window_halfwidth + 1;
            const int hi_year = t + config.window_halfwidth;
            int gi = (lo_year - g0 + step - 1) / step; // ceil((lo-g0)/step)
            if (lo_year <= g0) gi = 0;
            for (; gi < ng && g0 + gi * step <= hi_year; ++gi) {
                panel.set_replicate_bit(static_cast<int>(b), finding_parish[c], gi);
            }
        }
    });
    panel.finalize();
    return panel;
}

double exact_window_probability(std::span<const FindingRecord> parish_findings, int grid_year,
                                int window_halfwidth, double prior_c) {
    double none = 1.0;
    for (const FindingRecord& f : parish_findings) {
        const DatingDistribution dist = make_dating_distribution(f);
        double in_window = 0.0;
        for (int t = grid_year - window_halfwidth; t < grid_year + window_halfwidth; ++t) {
            in_window += dist.pmf_at(t);
        }
        none *= 1.0 - in_window;
    }
    return prior_c * (1.0 - none);
}

namespace {

constexpr char kMagic[4] = {'A', 'P', 'S', 'A'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw DataError("replicate cache: truncated file");
    return v;
}

} // namespace

void write_replicate_cache(const std::filesystem::path& path, const ActivityPanel& panel) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("replicate cache: cannot write " + path.string());
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(panel.n_replicates()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(panel.n_parishes()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(panel.n_years()));
    put<double>(out, panel.prior_c());
    for (int y : panel.years()) put<std::int32_t>(out, y);
    for (const std::string& id : panel.parish_ids()) {
        put<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
    }
    out.write(reinterpret_cast<const char*>(panel.words().data()),
              static_cast<std::streamsize>(panel.words().size() * sizeof(std::uint64_t)));
}

ActivityPanel read_replicate_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("replicate cache: cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw DataError("replicate cache: bad magic in " + path.string());
    }
    const auto version = get<std::uint32_t>(in);
    if (version != kVersion) {
        throw DataError("replicate cache: unsupported version " + std::to_string(version));
    }
    const auto B = get<std::uint32_t>(in);
    const auto P = get<std::uint32_t>(in);
    const auto G = get<std::uint32_t>(in);
    const auto prior = get<double>(in);
    std::vector<int> years(G);
    for (auto& y : years) y = get<std::int32_t>(in);
    std::vector<std::string> ids(P);
    for (auto& id : ids) {
        const auto len = get<std::uint16_t>(in);
        id.resize(len);
        in.read(id.data(), len);
        if (!in) throw DataError("replicate cache: truncated parish ids");
    }
    ActivityPanel panel(std::move(ids), std::move(years), static_cast<int>(B), prior);
    in.read(reinterpret_cast<char*>(panel.words().data()),
            static_cast<std::streamsize>(panel.words().size() * sizeof(std::uint64_t)));
    if (!in) throw DataError("replicate cache: truncated bit tensor");
    panel.finalize();
    return panel;
}

void write_activity_csv(const std::filesystem::path& path, const ActivityPanel& panel,
                        const std::string& comment) {
    CsvWriter w(path, comment);
    w.write_row({"parish_id", "year", "probability"});
    for (int p = 0; p < panel.n_parishes(); ++p) {
        for (int g = 0; g < panel.n_years(); ++g) {
            w.write_row({panel.parish_ids()[p], std::to_string(panel.years()[g]),
                         CsvWriter::fmt(panel.probability(p, g))});
        }
    }
}

} // namespace harbor::arch
