#ifndef HARBOR_CLI_PIPELINE_HPP
#define HARBOR_CLI_PIPELINE_HPP

#include "harbor/cli/config.hpp"
#include "harbor/est/event_study.hpp"
#include "harbor/est/ppml.hpp"
#include "harbor/geo/grid.hpp"
#include "harbor/ma/market_access.hpp"
#include "harbor/panel/census.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace harbor::cli {

geo::CostSurface load_surface(const RunConfig& config, double alpha,
                              const std::filesystem::path& raster_path);

/// Market access for all parishes on the given surface; parishes are read
/// from config.parishes (region column honoured when present).
struct MarketAccessStep {
    std::vector<ma::ParishSite> parishes;
    std::vector<ma::MarketAccessRecord> records;
};
MarketAccessStep run_market_access(const RunConfig& config, const geo::CostSurface& surface,
                                   double theta, std::vector<std::string>* warnings = nullptr);

/// Census panel joined with treatment variables, plus the dense unit
/// indexing used by the estimators.
struct CensusJoin {
    std::vector<panel::PanelObservation> observations;
    std::vector<std::string> parish_ids; // dense unit order
    std::vector<double> dummy_treat;     // 1 = west region
    std::vector<double> ma_treat;        // delta log MA
    std::vector<int> region_of;          // 0 west, 1 middle, 2 east, 3 reference
    std::vector<int> years;              // sorted census years
};
CensusJoin build_census_join(const RunConfig& config, const MarketAccessStep& ma_step,
                             std::vector<std::string>* warnings = nullptr);

/// Outcome column by name: population, occ_0_1, occ_2, ..., occ_7_8_9,
/// child_women_ratio, migrant_share. Missing optionals yield nullopt.
std::optional<double> outcome_value(const panel::PanelObservation& obs,
                                    const std::string& column);

struct EventStudyRun {
    std::string spec_id;
    std::string outcome = "population";
    est::Transform transform = est::Transform::Log;
    std::string treatment = "dummy"; // dummy | ma | three_region
    int bonferroni_m = 0;
    /// Optional per-unit filter (empty = all units).
    std::vector<char> unit_filter;
    /// Standardize the continuous treatment to zero mean, unit variance.
    bool standardize_ma = false;
};

est::EventStudyFit run_panel_event_study(const CensusJoin& join, const EventStudyRun& run,
                                         const RunConfig& config);

struct CoefficientRow {
    std::string spec_id;
    std::string term;
    double estimate = 0.0;
    double se = 0.0;
    double p = 1.0;
    double p_bonferroni = 1.0;
    int n_obs = 0;
    int n_clusters = 0;
};
std::vector<CoefficientRow> fit_to_rows(const std::string& spec_id,
                                        const est::EventStudyFit& fit);
void write_coefficients_csv(const std::filesystem::path& path,
                            const std::vector<CoefficientRow>& rows,
                            const std::string& comment);

/// Unit filters for the control-subgroup multiverse. Returns empty when the
/// subgroup keeps everything; throws ConfigError for unknown names.
std::vector<char> subgroup_filter(const std::string& name, const RunConfig& config,
                                  const CensusJoin& join);

/// Trade panel + PPML and the OLS transform variants.
std::vector<CoefficientRow> run_trade_regressions(const RunConfig& config,
                                                  std::vector<std::string>* warnings = nullptr);

int cmd_pipeline(const RunConfig& config);

} // namespace harbor::cli

#endif
