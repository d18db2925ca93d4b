#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "empcal/harness.hpp"

namespace empcal {

/// Round-trippable decimal rendering ("%.17g").
std::string format_real(double value);

inline constexpr const char* kSummaryHeader =
    "scenario,suitability,error_model,n,iterations,coverage_uncal,coverage_cal,std_abs_bias_uncal,"
    "std_abs_bias_cal,ci_width_uncal,ci_width_cal,control_cal_coverage,n_failed";
inline constexpr const char* kIterationsHeader =
    "iteration,arm,theta_true,estimate,se,ci_low,ci_high,covered,p_value,control_cal_coverage";
inline constexpr const char* kFunnelHeader = "iteration,arm,bias,se,significant";

void write_summary_csv(std::ostream& out, const ScenarioConfig& config, const ScenarioSummary& summary);
/// One row per usable iteration per arm; failed iterations appear only in
/// the manifest's failure log.
void write_iterations_csv(std::ostream& out, const std::vector<IterationRecord>& records);
void write_funnel_csv(std::ostream& out, const std::vector<IterationRecord>& records);

nlohmann::json manifest_json(const RunManifest& manifest);

/// Writes manifest.json always, and the three CSV files when a summary
/// exists. Creates `dir` if needed.
void write_outputs(const std::filesystem::path& dir, const ScenarioResult& result);

}  // namespace empcal
