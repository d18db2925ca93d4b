#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace empcal {

enum class Scenario {
  Reference,
  UnmeasuredConfounder,
  QuadraticTerm,
  InteractionTerm,
  NonPositivity,
  MeasurementError,
};

enum class Suitability { IdealSuitable, RandomSuitable, Unsuitable };

enum class ErrorModelKind { Full, Null };

/// Which fitted model defines the "largest effect" confounder that receives
/// measurement error.
enum class MeasurementErrorTarget { OutcomeModel, TreatmentModel };

/// Denominator of the standardized absolute bias.
enum class BiasStandardization { OwnSe, UncalibratedSe };

// Command-line spellings, e.g. "unmeasured-confounder", "ideal", "full".
std::string_view to_string(Scenario v);
std::string_view to_string(Suitability v);
std::string_view to_string(ErrorModelKind v);
std::string_view to_string(MeasurementErrorTarget v);
std::string_view to_string(BiasStandardization v);

// Throw Error(InvalidConfig) naming the accepted spellings on mismatch.
Scenario parse_scenario(std::string_view text);
Suitability parse_suitability(std::string_view text);
ErrorModelKind parse_error_model(std::string_view text);
MeasurementErrorTarget parse_me_target(std::string_view text);
BiasStandardization parse_standardization(std::string_view text);

/// log(1.5), log(2), log(4).
std::vector<double> default_positive_control_targets();

struct ScenarioConfig {
  Scenario scenario = Scenario::Reference;
  Suitability suitability = Suitability::RandomSuitable;
  int n_subjects = 50'000;
  int n_confounders = 10;
  int n_negative_controls = 5;
  int n_iterations = 500;
  double coef_low = -0.693;
  double coef_high = 0.6931;
  std::vector<double> positive_control_targets = default_positive_control_targets();
  std::uint64_t seed = 20210417;
  ErrorModelKind error_model = ErrorModelKind::Full;

  /// Under quadratic and interaction scenarios, whether the extra regressor
  /// also enters the treatment model (and so confounds).
  bool misspecified_treatment = true;

  double positivity_lower = 0.05;
  double positivity_upper = 0.95;
  /// Upper-quantile weight truncation in (0.5, 1); disabled when empty.
  std::optional<double> weight_truncation;
  MeasurementErrorTarget me_target = MeasurementErrorTarget::OutcomeModel;
  double me_mean_low = 0.1, me_mean_high = 1.0;
  double me_sd_low = 0.1, me_sd_high = 1.0;
  BiasStandardization standardization = BiasStandardization::OwnSe;
  double alpha = 0.05;

  /// Throws Error(InvalidConfig) whose message names the offending key.
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

nlohmann::json to_json(const ScenarioConfig& config);

/// Overlays the keys present in `j` onto `base`. Keys use the command-line
/// flag names without dashes prefix ("negative-controls", "seed", ...).
/// Unknown keys are rejected.
ScenarioConfig merge_json(ScenarioConfig base, const nlohmann::json& j);

}  // namespace empcal
