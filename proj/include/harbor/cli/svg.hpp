#ifndef HARBOR_CLI_SVG_HPP
#define HARBOR_CLI_SVG_HPP

#include "harbor/est/event_study.hpp"

#include <filesystem>
#include <string>

namespace harbor::cli {

struct EventPlotOptions {
    std::string title;
    /// Critical value for the error bars (1.96 for plain 95% intervals,
    /// the Bonferroni z for corrected suites).
    double ci_z = 1.959963984540054;
    int width = 720;
    int height = 420;
    /// Restrict to one treatment label when the fit carries several.
    std::string treatment;
};

/// Deterministic error-bar event plot (fixed-precision coordinates, no
/// timestamps), one point per event year with ci_z x SE whiskers.
void write_event_study_svg(const std::filesystem::path& path, const est::EventStudyFit& fit,
                           const EventPlotOptions& opts);

} // namespace harbor::cli

#endif
