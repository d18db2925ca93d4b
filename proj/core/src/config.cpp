#include "empcal/config.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <utility>

#include "empcal/errors.hpp"

namespace empcal {
namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view key, std::string_view text,
                const std::array<std::pair<std::string_view, Enum>, N>& table) {
  for (const auto& [name, value] : table) {
    if (name == text) return value;
  }
  std::ostringstream msg;
  msg << key << ": unknown value '" << text << "' (expected one of";
  for (const auto& entry : table) msg << ' ' << entry.first;
  msg << ')';
  throw Error(ErrorKind::InvalidConfig, msg.str());
}

constexpr std::array<std::pair<std::string_view, Scenario>, 6> kScenarios{{
    {"reference", Scenario::Reference},
    {"unmeasured-confounder", Scenario::UnmeasuredConfounder},
    {"quadratic", Scenario::QuadraticTerm},
    {"interaction", Scenario::InteractionTerm},
    {"non-positivity", Scenario::NonPositivity},
    {"measurement-error", Scenario::MeasurementError},
}};

constexpr std::array<std::pair<std::string_view, Suitability>, 3> kSuitability{{
    {"ideal", Suitability::IdealSuitable},
    {"random", Suitability::RandomSuitable},
    {"unsuitable", Suitability::Unsuitable},
}};

constexpr std::array<std::pair<std::string_view, ErrorModelKind>, 2> kErrorModels{{
    {"full", ErrorModelKind::Full},
    {"null", ErrorModelKind::Null},
}};

constexpr std::array<std::pair<std::string_view, MeasurementErrorTarget>, 2> kMeTargets{{
    {"outcome", MeasurementErrorTarget::OutcomeModel},
    {"treatment", MeasurementErrorTarget::TreatmentModel},
}};

constexpr std::array<std::pair<std::string_view, BiasStandardization>, 2> kStandardization{{
    {"own-se", BiasStandardization::OwnSe},
    {"uncalibrated-se", BiasStandardization::UncalibratedSe},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(Enum v, const std::array<std::pair<std::string_view, Enum>, N>& table) {
  for (const auto& [name, value] : table) {
    if (value == v) return name;
  }
  return "?";
}

[[noreturn]] void reject(std::string_view key, std::string_view constraint) {
  throw Error(ErrorKind::InvalidConfig, std::string(key) + ": " + std::string(constraint));
}

}  // namespace

std::string_view to_string(Scenario v) { return name_of(v, kScenarios); }
std::string_view to_string(Suitability v) { return name_of(v, kSuitability); }
std::string_view to_string(ErrorModelKind v) { return name_of(v, kErrorModels); }
std::string_view to_string(MeasurementErrorTarget v) { return name_of(v, kMeTargets); }
std::string_view to_string(BiasStandardization v) { return name_of(v, kStandardization); }

Scenario parse_scenario(std::string_view t) { return parse_enum("scenario", t, kScenarios); }
Suitability parse_suitability(std::string_view t) { return parse_enum("suitability", t, kSuitability); }
ErrorModelKind parse_error_model(std::string_view t) { return parse_enum("error-model", t, kErrorModels); }
MeasurementErrorTarget parse_me_target(std::string_view t) { return parse_enum("me-target", t, kMeTargets); }
BiasStandardization parse_standardization(std::string_view t) {
  return parse_enum("bias-standardization", t, kStandardization);
}

std::vector<double> default_positive_control_targets() {
  return {std::log(1.5), std::log(2.0), std::log(4.0)};
}

void ScenarioConfig::validate() const {
  if (n_subjects < 2) reject("subjects", "must be at least 2");
  if (n_confounders < 1) reject("confounders", "must be at least 1");
  if (scenario == Scenario::InteractionTerm && n_confounders < 2) {
    reject("confounders", "interaction scenario needs at least 2 confounders");
  }
  if (n_iterations < 1) reject("iterations", "must be at least 1");
  if (!(std::isfinite(coef_low) && std::isfinite(coef_high) && coef_low < coef_high)) {
    reject("coef-range", "coef_low must be strictly below coef_high");
  }
  if (n_negative_controls < 2) reject("negative-controls", "at least 2 negative controls are required");
  if (error_model == ErrorModelKind::Full) {
    if (positive_control_targets.empty()) {
      reject("targets", "the full error model needs at least one positive-control target");
    }
    for (double t : positive_control_targets) {
      if (!(std::isfinite(t) && t > 0.0)) reject("targets", "every target log odds ratio must be > 0");
    }
  }
  if (scenario == Scenario::MeasurementError && suitability == Suitability::Unsuitable) {
    reject("suitability", "unsuitable controls are not defined for the measurement-error scenario");
  }
  if (scenario == Scenario::Reference && suitability != Suitability::RandomSuitable) {
    reject("suitability", "the reference scenario only admits 'random'");
  }
  if (!(positivity_lower > 0.0 && positivity_lower < positivity_upper && positivity_upper < 1.0)) {
    reject("positivity-cutoffs", "need 0 < lower < upper < 1");
  }
  if (weight_truncation && !(*weight_truncation > 0.5 && *weight_truncation < 1.0)) {
    reject("weight-truncation", "quantile must lie in (0.5, 1)");
  }
  if (!(me_mean_low > 0.0 && me_mean_low <= me_mean_high)) {
    reject("me-mean-range", "need 0 < low <= high (error mean must be positive)");
  }
  if (!(me_sd_low >= 0.0 && me_sd_low <= me_sd_high)) reject("me-sd-range", "need 0 <= low <= high");
  if (!(alpha > 0.0 && alpha < 1.0)) reject("alpha", "must lie in (0, 1)");
}

nlohmann::json to_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["scenario"] = to_string(c.scenario);
  j["suitability"] = to_string(c.suitability);
  j["subjects"] = c.n_subjects;
  j["confounders"] = c.n_confounders;
  j["negative-controls"] = c.n_negative_controls;
  j["iterations"] = c.n_iterations;
  j["coef-range"] = {c.coef_low, c.coef_high};
  j["targets"] = c.positive_control_targets;
  j["seed"] = c.seed;
  j["error-model"] = to_string(c.error_model);
  j["misspecified-treatment"] = c.misspecified_treatment;
  j["positivity-cutoffs"] = {c.positivity_lower, c.positivity_upper};
  j["weight-truncation"] = c.weight_truncation ? nlohmann::json(*c.weight_truncation) : nlohmann::json(nullptr);
  j["me-target"] = to_string(c.me_target);
  j["me-mean-range"] = {c.me_mean_low, c.me_mean_high};
  j["me-sd-range"] = {c.me_sd_low, c.me_sd_high};
  j["bias-standardization"] = to_string(c.standardization);
  j["alpha"] = c.alpha;
  return j;
}

namespace {

std::pair<double, double> read_pair(const std::string& key, const nlohmann::json& v) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    reject(key, "expected a two-element numeric array");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

int read_count(const std::string& key, const nlohmann::json& v) {
  if (!v.is_number_integer()) reject(key, "expected an integer");
  return v.get<int>();
}

std::string read_text(const std::string& key, const nlohmann::json& v) {
  if (!v.is_string()) reject(key, "expected a string");
  return v.get<std::string>();
}

}  // namespace

ScenarioConfig merge_json(ScenarioConfig c, const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "config file: top level must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "scenario") {
      c.scenario = parse_scenario(read_text(key, v));
    } else if (key == "suitability") {
      c.suitability = parse_suitability(read_text(key, v));
    } else if (key == "subjects") {
      c.n_subjects = read_count(key, v);
    } else if (key == "confounders") {
      c.n_confounders = read_count(key, v);
    } else if (key == "negative-controls") {
      c.n_negative_controls = read_count(key, v);
    } else if (key == "iterations") {
      c.n_iterations = read_count(key, v);
    } else if (key == "coef-range") {
      std::tie(c.coef_low, c.coef_high) = read_pair(key, v);
    } else if (key == "targets") {
      if (!v.is_array()) reject(key, "expected an array of numbers");
      c.positive_control_targets.clear();
      for (const auto& t : v) {
        if (!t.is_number()) reject(key, "expected an array of numbers");
        c.positive_control_targets.push_back(t.get<double>());
      }
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) reject(key, "expected an unsigned 64-bit integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "error-model") {
      c.error_model = parse_error_model(read_text(key, v));
    } else if (key == "misspecified-treatment") {
      if (!v.is_boolean()) reject(key, "expected true or false");
      c.misspecified_treatment = v.get<bool>();
    } else if (key == "positivity-cutoffs") {
      std::tie(c.positivity_lower, c.positivity_upper) = read_pair(key, v);
    } else if (key == "weight-truncation") {
      if (v.is_null()) {
        c.weight_truncation.reset();
      } else if (v.is_number()) {
        c.weight_truncation = v.get<double>();
      } else {
        reject(key, "expected a number or null");
      }
    } else if (key == "me-target") {
      c.me_target = parse_me_target(read_text(key, v));
    } else if (key == "me-mean-range") {
      std::tie(c.me_mean_low, c.me_mean_high) = read_pair(key, v);
    } else if (key == "me-sd-range") {
      std::tie(c.me_sd_low, c.me_sd_high) = read_pair(key, v);
    } else if (key == "bias-standardization") {
      c.standardization = parse_standardization(read_text(key, v));
    } else if (key == "alpha") {
      if (!v.is_number()) reject(key, "expected a number");
      c.alpha = v.get<double>();
    } else {
      reject(key, "unknown configuration key");
    }
  }
  return c;
}

}  // namespace empcal
