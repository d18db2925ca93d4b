#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "empcal/errors.hpp"
#include "empcal/harness.hpp"
#include "empcal/report.hpp"

namespace empcal::cli {
namespace {

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
  throw Error(ErrorKind::InvalidConfig, key + ": " + what);
}

std::pair<double, double> parse_pair(const std::string& key, const std::string& text) {
  const auto v = parse_real_list(key, text);
  if (v.size() != 2) config_error(key, "expected two comma-separated numbers");
  return {v[0], v[1]};
}

// Raw flag values; applied only when the flag was given.
struct Flags {
  std::string config_file;
  std::string scenario, suitability, error_model, targets, cutoffs, me_target, standardization;
  int subjects = 0, iterations = 0, confounders = 0, negatives = 0;
  std::uint64_t seed = 0;
  double truncation = 0.0, alpha = 0.0;
  bool misspecified_treatment = true;
};

}  // namespace

std::vector<double> parse_real_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      config_error(key, "'" + item + "' is not a number");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      config_error(key, "'" + item + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) config_error(key, "expected a comma-separated list of numbers");
  return out;
}

RunRequest parse_run_args(const std::vector<std::string>& args) {
  CLI::App app{"empcal run"};
  app.allow_extras(false);
  Flags f;
  RunRequest req;
  std::string out_dir;

  auto* config_opt = app.add_option("--config", f.config_file, "JSON file of configuration keys");
  auto* scenario = app.add_option("--scenario", f.scenario,
                                  "reference|unmeasured-confounder|quadratic|interaction|non-positivity|"
                                  "measurement-error");
  auto* suitability = app.add_option("--suitability", f.suitability, "ideal|random|unsuitable");
  auto* subjects = app.add_option("--subjects", f.subjects, "subjects per iteration");
  auto* iterations = app.add_option("--iterations", f.iterations, "simulation iterations");
  auto* confounders = app.add_option("--confounders", f.confounders, "measured confounders");
  auto* negatives = app.add_option("--negative-controls", f.negatives, "negative-control outcomes");
  auto* error_model = app.add_option("--error-model", f.error_model, "full|null");
  auto* targets = app.add_option("--targets", f.targets, "positive-control log odds ratios, comma-separated");
  auto* cutoffs = app.add_option("--positivity-cutoffs", f.cutoffs, "lower,upper propensity cutoffs");
  auto* seed = app.add_option("--seed", f.seed, "64-bit seed");
  auto* truncation = app.add_option("--weight-truncation", f.truncation, "cap weights at this quantile");
  auto* me_target = app.add_option("--me-target", f.me_target, "outcome|treatment");
  auto* standardization = app.add_option("--bias-standardization", f.standardization, "own-se|uncalibrated-se");
  auto* misspecified = app.add_option("--misspecified-treatment", f.misspecified_treatment,
                                      "extra quadratic/interaction term also drives treatment (true|false)");
  auto* alpha = app.add_option("--alpha", f.alpha, "two-sided level of the intervals");
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_option("--threads", req.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", req.quiet, "suppress progress output");

  std::vector<const char*> argv{"empcal run"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }

  ScenarioConfig c;
  if (config_opt->count()) {
    std::ifstream in(f.config_file);
    if (!in) config_error("config", "cannot read " + f.config_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      config_error("config", std::string("invalid JSON: ") + e.what());
    }
    c = merge_json(c, j);
  }
  if (scenario->count()) c.scenario = parse_scenario(f.scenario);
  if (suitability->count()) c.suitability = parse_suitability(f.suitability);
  if (subjects->count()) c.n_subjects = f.subjects;
  if (iterations->count()) c.n_iterations = f.iterations;
  if (confounders->count()) c.n_confounders = f.confounders;
  if (negatives->count()) c.n_negative_controls = f.negatives;
  if (error_model->count()) c.error_model = parse_error_model(f.error_model);
  if (targets->count()) c.positive_control_targets = parse_real_list("targets", f.targets);
  if (cutoffs->count()) std::tie(c.positivity_lower, c.positivity_upper) = parse_pair("positivity-cutoffs", f.cutoffs);
  if (seed->count()) c.seed = f.seed;
  if (truncation->count()) c.weight_truncation = f.truncation;
  if (me_target->count()) c.me_target = parse_me_target(f.me_target);
  if (standardization->count()) c.standardization = parse_standardization(f.standardization);
  if (misspecified->count()) c.misspecified_treatment = f.misspecified_treatment;
  if (alpha->count()) c.alpha = f.alpha;
  c.validate();

  req.config = std::move(c);
  req.out_dir = out_dir;
  return req;
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const std::string usage = "usage: empcal run --out DIR [options]   (empcal run --help for options)";
  if (args.empty() || args[0] == "--help" || args[0] == "-h") {
    out << usage << '\n';
    return args.empty() ? kExitConfigError : kExitOk;
  }
  if (args[0] == "--version") {
    out << "empcal " << kToolVersion << '\n';
    return kExitOk;
  }
  if (args[0] != "run") {
    err << "unknown command '" << args[0] << "'\n" << usage << '\n';
    return kExitConfigError;
  }
  const std::vector<std::string> rest(args.begin() + 1, args.end());
  for (const auto& a : rest) {
    if (a == "--help" || a == "-h") {
      out << "empcal run --scenario S --suitability M --subjects N --iterations K --confounders M\n"
             "           --negative-controls S --error-model full|null --targets LIST\n"
             "           --positivity-cutoffs LO,HI --seed U64 --out DIR [--threads T]\n"
             "           [--weight-truncation Q] [--config FILE] [--me-target outcome|treatment]\n"
             "           [--bias-standardization own-se|uncalibrated-se] [--alpha A] [--quiet]\n"
             "           [--misspecified-treatment true|false]\n";
      return kExitOk;
    }
  }

  RunRequest req;
  try {
    req = parse_run_args(rest);
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  RunOptions options;
  options.threads = req.threads;
  if (!req.quiet) {
    options.progress = [&err](int done, int total) {
      if (done == total || done % 25 == 0) err << "\r" << done << "/" << total << " iterations" << std::flush;
    };
  }
  const ScenarioResult result = run_scenario(req.config, options);
  if (!req.quiet) err << '\n';
  write_outputs(req.out_dir, result);

  if (result.summary) {
    const auto& s = *result.summary;
    out << "coverage uncalibrated " << s.coverage_uncal << ", calibrated " << s.coverage_cal << "; ci width "
        << s.mean_ci_width_uncal << " -> " << s.mean_ci_width_cal << "; failed " << s.n_failed << '\n';
  }
  if (result.manifest.aborted) {
    err << "aborted: " << result.manifest.failures.size() << " of " << req.config.n_iterations
        << " iterations failed\n";
    return kExitExcessiveFailures;
  }
  return kExitOk;
}

}  // namespace empcal::cli
