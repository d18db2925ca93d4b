#include "empcal/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace empcal {
namespace {

// Usable records in iteration order, so sums do not depend on input order.
std::vector<const IterationRecord*> usable(std::span<const IterationRecord> records) {
  std::vector<const IterationRecord*> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (!r.failed()) out.push_back(&r);
  }
  if (out.empty()) throw Error(ErrorKind::EmptyInput, "no usable iteration records");
  std::stable_sort(out.begin(), out.end(), [](auto a, auto b) { return a->iteration < b->iteration; });
  return out;
}

template <typename F>
double mean_over(std::span<const IterationRecord> records, F&& f) {
  const auto rows = usable(records);
  double sum = 0.0;
  for (const auto* r : rows) sum += f(*r);
  return sum / static_cast<double>(rows.size());
}

bool covers(const ArmView& v, double truth) { return v.ci_low <= truth && truth <= v.ci_high; }

}  // namespace

std::string_view to_string(Arm arm) { return arm == Arm::Calibrated ? "calibrated" : "uncalibrated"; }

WaldInterval wald_interval(double theta_hat, double se_hat, double alpha) {
  const double z = two_sided_quantile(alpha);
  return WaldInterval{theta_hat, se_hat, theta_hat - z * se_hat, theta_hat + z * se_hat};
}

ArmView arm_view(const IterationRecord& r, Arm arm) {
  if (arm == Arm::Calibrated) return ArmView{r.cal.theta_cal, r.cal.se_cal, r.cal.ci_low, r.cal.ci_high};
  return ArmView{r.uncal.theta_hat, r.uncal.se_hat, r.uncal.ci_low, r.uncal.ci_high};
}

double coverage(std::span<const IterationRecord> records, Arm arm) {
  return mean_over(records, [arm](const IterationRecord& r) { return covers(arm_view(r, arm), r.theta_true) ? 1.0 : 0.0; });
}

double mean_standardized_abs_bias(std::span<const IterationRecord> records, Arm arm,
                                  BiasStandardization standardization) {
  return mean_over(records, [&](const IterationRecord& r) {
    const ArmView v = arm_view(r, arm);
    const double se = standardization == BiasStandardization::OwnSe ? v.se : r.uncal.se_hat;
    return std::abs(v.estimate - r.theta_true) / se;
  });
}

double mean_ci_width(std::span<const IterationRecord> records, Arm arm) {
  return mean_over(records, [arm](const IterationRecord& r) {
    const ArmView v = arm_view(r, arm);
    return v.ci_high - v.ci_low;
  });
}

double mean_bias(std::span<const IterationRecord> records, Arm arm) {
  return mean_over(records, [arm](const IterationRecord& r) { return arm_view(r, arm).estimate - r.theta_true; });
}

double bias_mcse(std::span<const IterationRecord> records, Arm arm) {
  const auto rows = usable(records);
  if (rows.size() < 2) return 0.0;
  const double mean = mean_bias(records, arm);
  double ss = 0.0;
  for (const auto* r : rows) {
    const double d = arm_view(*r, arm).estimate - r->theta_true - mean;
    ss += d * d;
  }
  const auto n = static_cast<double>(rows.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

double mean_control_coverage(std::span<const IterationRecord> records) {
  return mean_over(records, [](const IterationRecord& r) { return r.control_cal_coverage; });
}

std::vector<FunnelRow> build_funnel_rows(std::span<const IterationRecord> records) {
  const auto rows = usable(records);
  std::vector<FunnelRow> out;
  out.reserve(2 * rows.size());
  for (const auto* r : rows) {
    for (const Arm arm : {Arm::Uncalibrated, Arm::Calibrated}) {
      const ArmView v = arm_view(*r, arm);
      out.push_back(FunnelRow{r->iteration, arm, v.estimate - r->theta_true, v.se, !covers(v, r->theta_true)});
    }
  }
  return out;
}

ScenarioSummary summarize(std::span<const IterationRecord> records, BiasStandardization standardization) {
  ScenarioSummary s;
  s.coverage_uncal = coverage(records, Arm::Uncalibrated);
  s.coverage_cal = coverage(records, Arm::Calibrated);
  s.mean_std_abs_bias_uncal = mean_standardized_abs_bias(records, Arm::Uncalibrated, standardization);
  s.mean_std_abs_bias_cal = mean_standardized_abs_bias(records, Arm::Calibrated, standardization);
  s.mean_ci_width_uncal = mean_ci_width(records, Arm::Uncalibrated);
  s.mean_ci_width_cal = mean_ci_width(records, Arm::Calibrated);
  s.mean_bias_uncal = mean_bias(records, Arm::Uncalibrated);
  s.mean_bias_cal = mean_bias(records, Arm::Calibrated);
  s.bias_mcse_uncal = bias_mcse(records, Arm::Uncalibrated);
  s.bias_mcse_cal = bias_mcse(records, Arm::Calibrated);
  s.control_cal_coverage = mean_control_coverage(records);
  s.n_iterations_used = static_cast<int>(usable(records).size());
  s.n_failed = static_cast<int>(records.size()) - s.n_iterations_used;
  return s;
}

}  // namespace empcal
