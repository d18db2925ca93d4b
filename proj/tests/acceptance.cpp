// Acceptance suite: runs the simulation cells the criteria refer to and prints
// one PASS/FAIL line per criterion.
//
//   empcal_acceptance [path/to/empcal_tests]
//
// EMPCAL_ACCEPTANCE_SCALE=full switches from 200 x 20,000 to 500 x 50,000.
// EMPCAL_ACCEPTANCE_THREADS sets the worker count (default: all cores).
// EMPCAL_ACCEPTANCE_STRICT=1 makes any FAIL line a nonzero exit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "empcal/harness.hpp"
#include "empcal/metrics.hpp"

using namespace empcal;

namespace {

struct Scale {
  int iterations;
  int subjects;
  std::string name;
};

Scale scale_from_env() {
  const char* s = std::getenv("EMPCAL_ACCEPTANCE_SCALE");
  if (s && std::string(s) == "full") return {500, 50'000, "full"};
  return {200, 20'000, "desk"};
}

int threads_from_env() {
  if (const char* t = std::getenv("EMPCAL_ACCEPTANCE_THREADS")) return std::max(1, std::atoi(t));
  return std::max(1u, std::thread::hardware_concurrency());
}

struct Cell {
  Scenario scenario;
  Suitability suitability;
};

std::string cell_name(const Cell& c) {
  return std::string(to_string(c.scenario)) + "/" + std::string(to_string(c.suitability));
}

// Records for the four calibration variants of one cell, sharing the data.
struct Variants {
  std::vector<IterationRecord> full5, null5, full30, null30;
};

IterationRecord failed_record(int iteration, const Error& e) {
  IterationRecord r;
  r.iteration = iteration;
  r.failure = e.kind();
  r.failure_message = e.what();
  return r;
}

ScenarioConfig base_config(const Scale& scale, Scenario scenario, Suitability suitability) {
  ScenarioConfig c;
  c.scenario = scenario;
  c.suitability = suitability;
  c.n_subjects = scale.subjects;
  c.n_iterations = scale.iterations;
  return c;
}

Variants run_cell(const Scale& scale, const Cell& cell, int threads) {
  ScenarioConfig c = base_config(scale, cell.scenario, cell.suitability);
  c.n_negative_controls = 30;
  const auto n = static_cast<std::size_t>(c.n_iterations);
  Variants v;
  v.full5.resize(n);
  v.null5.resize(n);
  v.full30.resize(n);
  v.null30.resize(n);
  parallel_for(c.n_iterations, threads, [&](int it) {
    const auto i = static_cast<std::size_t>(it);
    std::optional<IterationAnalysis> analysis;
    try {
      analysis = analyze_iteration(c, it);
    } catch (const Error& e) {
      v.full5[i] = v.null5[i] = v.full30[i] = v.null30[i] = failed_record(it, e);
      return;
    }
    const auto calibrate = [&](ErrorModelKind kind, std::optional<int> k) {
      try {
        return calibrate_iteration(*analysis, kind, c.alpha, k);
      } catch (const Error& e) {
        return failed_record(it, e);
      }
    };
    v.full5[i] = calibrate(ErrorModelKind::Full, 5);
    v.null5[i] = calibrate(ErrorModelKind::Null, 5);
    v.full30[i] = calibrate(ErrorModelKind::Full, std::nullopt);
    v.null30[i] = calibrate(ErrorModelKind::Null, std::nullopt);
  });
  return v;
}

int failures(const std::vector<IterationRecord>& rs) {
  int k = 0;
  for (const auto& r : rs) k += r.failed();
  return k;
}

bool completed(const std::vector<IterationRecord>& rs) {
  const int f = failures(rs);
  return f < static_cast<int>(rs.size()) && f <= kMaxFailureFraction * static_cast<double>(rs.size());
}

std::string fmt(double v, int digits = 3) {
  std::ostringstream s;
  s.precision(digits);
  s << std::fixed << v;
  return s.str();
}

bool within(double value, double centre, double tolerance) { return std::abs(value - centre) <= tolerance; }

int passed = 0, total = 0;

void report(int id, bool ok, const std::string& detail) {
  ++total;
  passed += ok;
  std::cout << "criterion " << id << ": " << (ok ? "PASS" : "FAIL") << "  " << detail << std::endl;
}

double cov(const std::vector<IterationRecord>& rs, Arm arm) { return coverage(rs, arm); }

}  // namespace

int main(int argc, char** argv) {
  const Scale scale = scale_from_env();
  const int threads = threads_from_env();
  const auto t0 = std::chrono::steady_clock::now();
  std::cout << "scale " << scale.name << ": " << scale.iterations << " iterations x " << scale.subjects
            << " subjects, " << threads << " thread(s)" << std::endl;

  try {
    // 1. Reference.
    {
      const ScenarioResult r =
          run_scenario(base_config(scale, Scenario::Reference, Suitability::RandomSuitable), RunOptions{threads, {}});
      bool ok = r.summary.has_value() && !r.manifest.aborted;
      std::string detail = "no usable iterations";
      if (r.summary) {
        const auto& s = *r.summary;
        ok = ok && s.coverage_uncal >= 0.91 && s.coverage_uncal <= 0.99 && s.coverage_cal >= 0.91 &&
             s.coverage_cal <= 0.99 && std::abs(s.mean_bias_uncal) <= 2 * s.bias_mcse_uncal &&
             std::abs(s.mean_bias_cal) <= 2 * s.bias_mcse_cal;
        detail = "coverage uncal " + fmt(s.coverage_uncal) + ", cal " + fmt(s.coverage_cal) +
                 " (need [0.91, 0.99]); mean bias uncal " + fmt(s.mean_bias_uncal, 4) + " (2 mcse " +
                 fmt(2 * s.bias_mcse_uncal, 4) + "), cal " + fmt(s.mean_bias_cal, 4) + " (2 mcse " +
                 fmt(2 * s.bias_mcse_cal, 4) + ")";
      }
      report(1, ok, detail);
    }

    // Suitable-control cells with 30 negatives; the first 5 reproduce a
    // 5-control run on the same data.
    const std::vector<Cell> cells{
        {Scenario::UnmeasuredConfounder, Suitability::IdealSuitable},
        {Scenario::UnmeasuredConfounder, Suitability::RandomSuitable},
        {Scenario::QuadraticTerm, Suitability::IdealSuitable},
        {Scenario::QuadraticTerm, Suitability::RandomSuitable},
        {Scenario::InteractionTerm, Suitability::IdealSuitable},
        {Scenario::InteractionTerm, Suitability::RandomSuitable},
        {Scenario::NonPositivity, Suitability::IdealSuitable},
        {Scenario::NonPositivity, Suitability::RandomSuitable},
        {Scenario::MeasurementError, Suitability::IdealSuitable},
        {Scenario::MeasurementError, Suitability::RandomSuitable},
    };
    std::map<std::string, Variants> runs;
    for (const Cell& cell : cells) {
      runs[cell_name(cell)] = run_cell(scale, cell, threads);
      const auto& v = runs[cell_name(cell)];
      std::cout << "  " << cell_name(cell) << ": uncal " << fmt(cov(v.full5, Arm::Uncalibrated)) << ", full5 "
                << fmt(cov(v.full5, Arm::Calibrated)) << ", null5 " << fmt(cov(v.null5, Arm::Calibrated))
                << ", full30 " << fmt(cov(v.full30, Arm::Calibrated)) << ", null30 "
                << fmt(cov(v.null30, Arm::Calibrated)) << "; width " << fmt(mean_ci_width(v.full5, Arm::Uncalibrated))
                << " -> " << fmt(mean_ci_width(v.full5, Arm::Calibrated)) << "; failed " << failures(v.full5) << "/"
                << failures(v.full30) << std::endl;
    }

    const auto& u_random = runs.at("unmeasured-confounder/random");
    const auto& u_ideal = runs.at("unmeasured-confounder/ideal");

    // 2.
    {
      const double un = cov(u_random.full5, Arm::Uncalibrated), ca = cov(u_random.full5, Arm::Calibrated);
      report(2, within(un, 0.31, 0.10) && within(ca, 0.91, 0.08) && ca - un >= 0.40,
             "uncal " + fmt(un) + " (need 0.31 +/- 0.10), cal " + fmt(ca) + " (need 0.91 +/- 0.08), gain " +
                 fmt(ca - un) + " (need >= 0.40)");
    }
    // 3.
    {
      const double un = cov(u_ideal.full5, Arm::Uncalibrated), ca = cov(u_ideal.full5, Arm::Calibrated);
      report(3, within(ca, 0.79, 0.10) && within(un, 0.31, 0.10),
             "cal " + fmt(ca) + " (need 0.79 +/- 0.10), uncal " + fmt(un) + " (need 0.31 +/- 0.10)");
    }
    // 4.
    {
      const ScenarioResult r = run_scenario(
          base_config(scale, Scenario::UnmeasuredConfounder, Suitability::Unsuitable), RunOptions{threads, {}});
      bool ok = false;
      std::string detail = "no usable iterations";
      if (r.summary) {
        const auto& s = *r.summary;
        ok = !r.manifest.aborted && within(s.coverage_cal, s.coverage_uncal + 0.05, 0.08);
        detail = "uncal " + fmt(s.coverage_uncal) + ", cal " + fmt(s.coverage_cal) + " (need uncal + 0.05 +/- 0.08)";
      }
      report(4, ok, detail);
    }
    // 5.
    {
      const auto& q = runs.at("quadratic/random");
      const double un = cov(q.full5, Arm::Uncalibrated), ca = cov(q.full5, Arm::Calibrated);
      report(5, within(un, 0.72, 0.10) && ca >= 0.95,
             "uncal " + fmt(un) + " (need 0.72 +/- 0.10), cal " + fmt(ca) + " (need >= 0.95)");
    }
    // 6. Both measurement-error cells.
    {
      bool ok = true;
      std::string detail;
      for (const char* name : {"measurement-error/ideal", "measurement-error/random"}) {
        const auto& m = runs.at(name);
        const double un = cov(m.full5, Arm::Uncalibrated), ca = cov(m.full5, Arm::Calibrated);
        ok = ok && un >= 0.92 && un <= 0.98 && ca >= 0.92 && ca <= 0.98 && std::abs(ca - un) <= 0.03;
        detail += std::string(name) + ": uncal " + fmt(un) + ", cal " + fmt(ca) + "; ";
      }
      report(6, ok, detail + "need both in [0.92, 0.98], |diff| <= 0.03");
    }
    // 7.
    {
      const double factor = std::sqrt(50'000.0 / scale.subjects);
      const double wu = mean_ci_width(u_random.full5, Arm::Uncalibrated);
      const double wc = mean_ci_width(u_random.full5, Arm::Calibrated);
      report(7, within(wu, 0.10 * factor, 0.03 * factor) && wc / wu >= 3.0,
             "uncal width " + fmt(wu) + " (need " + fmt(0.10 * factor) + " +/- " + fmt(0.03 * factor) +
                 "), ratio " + fmt(wc / wu, 2) + " (need >= 3)");
    }
    // 8.
    {
      int holds = 0;
      for (const Cell& cell : cells) {
        const auto& v = runs.at(cell_name(cell));
        holds += cov(v.null5, Arm::Calibrated) <= cov(v.full5, Arm::Calibrated);
      }
      const auto& inter = runs.at("interaction/ideal");
      const double n = cov(inter.null5, Arm::Calibrated), f = cov(inter.full5, Arm::Calibrated);
      report(8, n <= f && holds >= 7,
             "interaction/ideal null " + fmt(n) + " vs full " + fmt(f) + "; null <= full in " + std::to_string(holds) +
                 "/10 cells (need >= 7)");
    }
    // 9. Property suites live in the unit-test binary.
    {
      if (argc < 2) {
        report(9, false, "unit-test binary path not given");
      } else {
        const std::string filter =
            "FitLogistic.TwoByTwoCrossProductRatio:FitLogistic.WeightScalingLeavesCoefficients:"
            "EstimateEffect.TwoByTwoOracle:EstimateEffect.WeightScalingInvariance:"
            "EstimateEffect.SandwichMatchesBootstrap:FitNullModel.SymmetricEstimatesMatchGridSearch:"
            "FitSystematicErrorModel.MatchesGridRefinementOracle:CalibrateCi.DegeneracyAtTinySigma:"
            "CalibrateCi.InversionConsistency:Harness.DeterministicAcrossThreadCounts:"
            "Report.CsvBytesIndependentOfThreads";
        const std::string cmd = std::string("\"") + argv[1] + "\" --gtest_brief=1 --gtest_filter=" + filter;
        const int rc = std::system(cmd.c_str());
        report(9, rc == 0, "11 property tests " + std::string(rc == 0 ? "passed" : "failed"));
      }
    }
    // 10.
    {
      bool ok = true;
      double worst = 0.0;
      std::string worst_cell;
      for (const Cell& cell : cells) {
        const auto& v = runs.at(cell_name(cell));
        ok = ok && completed(v.full30);
        const double d = cov(v.full30, Arm::Calibrated) - cov(v.full5, Arm::Calibrated);
        if (std::abs(d) > std::abs(worst)) {
          worst = d;
          worst_cell = cell_name(cell);
        }
      }
      ok = ok && std::abs(worst) <= 0.10;
      report(10, ok, "30-control runs complete; largest coverage change " + fmt(worst) + " (" + worst_cell +
                         ", need |change| <= 0.10)");
    }
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << std::endl;
    return 1;
  }

  const double minutes =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
  std::cout << passed << "/" << total << " criteria pass (" << fmt(minutes, 1) << " min)" << std::endl;
  const char* strict = std::getenv("EMPCAL_ACCEPTANCE_STRICT");
  if (strict && std::string(strict) == "1" && passed != total) return 2;
  return 0;
}
