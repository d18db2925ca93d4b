#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "empcal/errors.hpp"
#include "empcal/harness.hpp"

namespace empcal {
namespace {

namespace fs = std::filesystem;

TEST(Cli, Defaults) {
  const cli::RunRequest r = cli::parse_run_args({"--out", "x"});
  EXPECT_EQ(r.config, ScenarioConfig{});
  EXPECT_EQ(r.out_dir, fs::path("x"));
  EXPECT_EQ(r.threads, 1);
  EXPECT_FALSE(r.quiet);
}

TEST(Cli, Flags) {
  const cli::RunRequest r = cli::parse_run_args(
      {"--scenario", "unmeasured-confounder", "--suitability", "ideal", "--negative-controls", "30", "--subjects",
       "1000", "--iterations", "7", "--error-model", "null", "--targets", "0.5,1", "--positivity-cutoffs",
       "0.1,0.9", "--seed", "18446744073709551615", "--misspecified-treatment", "false", "--threads", "4",
       "--quiet", "--out", "o"});
  EXPECT_EQ(r.config.scenario, Scenario::UnmeasuredConfounder);
  EXPECT_EQ(r.config.suitability, Suitability::IdealSuitable);
  EXPECT_EQ(r.config.n_negative_controls, 30);
  EXPECT_EQ(r.config.n_subjects, 1000);
  EXPECT_EQ(r.config.n_iterations, 7);
  EXPECT_EQ(r.config.error_model, ErrorModelKind::Null);
  EXPECT_EQ(r.config.positive_control_targets, (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(r.config.positivity_lower, 0.1);
  EXPECT_EQ(r.config.positivity_upper, 0.9);
  EXPECT_EQ(r.config.seed, 18446744073709551615ULL);
  EXPECT_FALSE(r.config.misspecified_treatment);
  EXPECT_EQ(r.threads, 4);
  EXPECT_TRUE(r.quiet);
}

int run(const std::vector<std::string>& args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::main(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

TEST(Cli, InvalidCombinationsExitTwo) {
  std::string err;
  EXPECT_EQ(run({"run", "--scenario", "measurement-error", "--suitability", "unsuitable", "--out", "x"}, nullptr, &err),
            cli::kExitConfigError);
  EXPECT_NE(err.find("suitability"), std::string::npos);
  EXPECT_EQ(run({"run", "--bogus", "--out", "x"}), cli::kExitConfigError);
  EXPECT_EQ(run({"run", "--targets", "0.5,abc", "--out", "x"}, nullptr, &err), cli::kExitConfigError);
  EXPECT_NE(err.find("targets"), std::string::npos);
  EXPECT_EQ(run({"run", "--scenario", "reference"}), cli::kExitConfigError);  // --out is required
  EXPECT_EQ(run({"frobnicate"}), cli::kExitConfigError);
  EXPECT_EQ(run({}), cli::kExitConfigError);
}

TEST(Cli, Version) {
  std::string out;
  EXPECT_EQ(run({"--version"}, &out), cli::kExitOk);
  EXPECT_EQ(out, std::string("empcal ") + kToolVersion + "\n");
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const fs::path file = fs::temp_directory_path() / "empcal_cli_config.json";
  {
    std::ofstream f(file);
    f << R"({"scenario": "quadratic", "subjects": 1234, "seed": 9, "negative-controls": 30})";
  }
  const cli::RunRequest r = cli::parse_run_args({"--config", file.string(), "--seed", "10", "--out", "o"});
  EXPECT_EQ(r.config.scenario, Scenario::QuadraticTerm);
  EXPECT_EQ(r.config.n_subjects, 1234);
  EXPECT_EQ(r.config.n_negative_controls, 30);
  EXPECT_EQ(r.config.seed, 10u);

  {
    std::ofstream f(file);
    f << R"({"no-such-key": 1})";
  }
  EXPECT_THROW(cli::parse_run_args({"--config", file.string(), "--out", "o"}), Error);
  fs::remove(file);
}

TEST(Cli, EndToEndRun) {
  const fs::path dir = fs::temp_directory_path() / "empcal_cli_run";
  fs::remove_all(dir);
  std::string out;
  EXPECT_EQ(run({"run", "--subjects", "2000", "--iterations", "3", "--threads", "2", "--quiet", "--out", dir.string()},
                &out),
            cli::kExitOk);
  EXPECT_NE(out.find("coverage uncalibrated"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "summary.csv"));
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  fs::remove_all(dir);
}

}  // namespace
}  // namespace empcal
