#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "empcal/calibrator.hpp"
#include "empcal/config.hpp"
#include "empcal/errors.hpp"

namespace empcal {

enum class Arm { Uncalibrated, Calibrated };

std::string_view to_string(Arm arm);  // "uncalibrated" / "calibrated"

struct WaldInterval {
  double theta_hat = 0.0;
  double se_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

WaldInterval wald_interval(double theta_hat, double se_hat, double alpha = 0.05);

struct IterationRecord {
  int iteration = 0;
  double theta_true = 0.0;
  WaldInterval uncal;
  CalibratedEstimate cal;
  /// Share of this iteration's controls whose calibrated CI covers their
  /// true effect.
  double control_cal_coverage = 0.0;
  /// Set when the iteration failed; such records are excluded from every
  /// aggregate and counted in n_failed.
  std::optional<ErrorKind> failure;
  std::string failure_message;

  bool failed() const { return failure.has_value(); }
};

struct ArmView {
  double estimate;
  double se;
  double ci_low;
  double ci_high;
};

ArmView arm_view(const IterationRecord& record, Arm arm);

// All of these skip failed records and throw EmptyInput when nothing is left.
double coverage(std::span<const IterationRecord> records, Arm arm);
double mean_standardized_abs_bias(std::span<const IterationRecord> records, Arm arm,
                                  BiasStandardization standardization = BiasStandardization::OwnSe);
double mean_ci_width(std::span<const IterationRecord> records, Arm arm);
double mean_bias(std::span<const IterationRecord> records, Arm arm);
/// Monte Carlo standard error of mean_bias.
double bias_mcse(std::span<const IterationRecord> records, Arm arm);
double mean_control_coverage(std::span<const IterationRecord> records);

struct FunnelRow {
  int iteration = 0;
  Arm arm = Arm::Uncalibrated;
  double bias = 0.0;  // estimate - theta_true
  double se = 0.0;
  bool significant = false;  // the arm's CI excludes theta_true
};

/// Two rows per usable iteration, ordered by (iteration, uncalibrated first).
std::vector<FunnelRow> build_funnel_rows(std::span<const IterationRecord> records);

struct ScenarioSummary {
  double coverage_uncal = 0.0;
  double coverage_cal = 0.0;
  double mean_std_abs_bias_uncal = 0.0;
  double mean_std_abs_bias_cal = 0.0;
  double mean_ci_width_uncal = 0.0;
  double mean_ci_width_cal = 0.0;
  double mean_bias_uncal = 0.0;
  double mean_bias_cal = 0.0;
  double bias_mcse_uncal = 0.0;
  double bias_mcse_cal = 0.0;
  double control_cal_coverage = 0.0;
  int n_iterations_used = 0;
  int n_failed = 0;
};

ScenarioSummary summarize(std::span<const IterationRecord> records,
                          BiasStandardization standardization = BiasStandardization::OwnSe);

}  // namespace empcal
