#include "empcal/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace empcal {
namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_summary_csv(std::ostream& out, const ScenarioConfig& c, const ScenarioSummary& s) {
  out << kSummaryHeader << '\n';
  out << to_string(c.scenario) << ',' << to_string(c.suitability) << ',' << to_string(c.error_model) << ','
      << c.n_subjects << ',' << c.n_iterations << ',' << format_real(s.coverage_uncal) << ','
      << format_real(s.coverage_cal) << ',' << format_real(s.mean_std_abs_bias_uncal) << ','
      << format_real(s.mean_std_abs_bias_cal) << ',' << format_real(s.mean_ci_width_uncal) << ','
      << format_real(s.mean_ci_width_cal) << ',' << format_real(s.control_cal_coverage) << ',' << s.n_failed
      << '\n';
}

void write_iterations_csv(std::ostream& out, const std::vector<IterationRecord>& records) {
  out << kIterationsHeader << '\n';
  for (const auto& r : records) {
    if (r.failed()) continue;
    for (const Arm arm : {Arm::Uncalibrated, Arm::Calibrated}) {
      const ArmView v = arm_view(r, arm);
      const bool covered = v.ci_low <= r.theta_true && r.theta_true <= v.ci_high;
      const double p = arm == Arm::Calibrated
                           ? r.cal.p_cal
                           : std::erfc(std::abs(r.uncal.theta_hat / r.uncal.se_hat) / std::sqrt(2.0));
      out << r.iteration << ',' << to_string(arm) << ',' << format_real(r.theta_true) << ','
          << format_real(v.estimate) << ',' << format_real(v.se) << ',' << format_real(v.ci_low) << ','
          << format_real(v.ci_high) << ',' << (covered ? 1 : 0) << ',' << format_real(p) << ','
          << format_real(r.control_cal_coverage) << '\n';
    }
  }
}

void write_funnel_csv(std::ostream& out, const std::vector<IterationRecord>& records) {
  out << kFunnelHeader << '\n';
  bool any = false;
  for (const auto& r : records) any = any || !r.failed();
  if (!any) return;
  for (const auto& row : build_funnel_rows(records)) {
    out << row.iteration << ',' << to_string(row.arm) << ',' << format_real(row.bias) << ','
        << format_real(row.se) << ',' << (row.significant ? 1 : 0) << '\n';
  }
}

nlohmann::json manifest_json(const RunManifest& m) {
  nlohmann::json j;
  j["tool_version"] = m.tool_version;
  j["config"] = to_json(m.config);
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["threads"] = m.threads;
  j["aborted"] = m.aborted;
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : m.failures) {
    failures.push_back({{"iteration", f.iteration}, {"error", to_string(f.kind)}, {"message", f.message}});
  }
  j["failures"] = std::move(failures);
  j["unbounded_intervals"] = m.unbounded_intervals;
  return j;
}

void write_outputs(const std::filesystem::path& dir, const ScenarioResult& result) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_for_write(dir / "manifest.json");
    out << manifest_json(result.manifest).dump(2) << '\n';
  }
  if (!result.summary) return;
  {
    auto out = open_for_write(dir / "summary.csv");
    write_summary_csv(out, result.manifest.config, *result.summary);
  }
  {
    auto out = open_for_write(dir / "iterations.csv");
    write_iterations_csv(out, result.records);
  }
  {
    auto out = open_for_write(dir / "funnel.csv");
    write_funnel_csv(out, result.records);
  }
}

}  // namespace empcal
