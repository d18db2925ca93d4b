#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "empcal/calibrator.hpp"
#include "empcal/estimator.hpp"
#include "empcal/harness.hpp"
#include "empcal/logistic.hpp"
#include "empcal/random.hpp"
#include "empcal/scenario.hpp"

namespace {

using namespace empcal;

ScenarioConfig bench_config(int subjects, int negatives) {
  ScenarioConfig c;
  c.scenario = Scenario::UnmeasuredConfounder;
  c.n_subjects = subjects;
  c.n_negative_controls = negatives;
  return c;
}

void BM_BuildStudy(benchmark::State& state) {
  const ScenarioConfig c = bench_config(static_cast<int>(state.range(0)), 5);
  int it = 0;
  for (auto _ : state) benchmark::DoNotOptimize(build_study(c, it++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildStudy)->Arg(20'000)->Arg(50'000)->Unit(benchmark::kMillisecond);

void BM_PropensityFit(benchmark::State& state) {
  const SimulatedStudy s = build_study(bench_config(static_cast<int>(state.range(0)), 5), 0);
  for (auto _ : state) benchmark::DoNotOptimize(propensity_scores(s.x_observed, s.z));
}
BENCHMARK(BM_PropensityFit)->Arg(20'000)->Arg(50'000)->Unit(benchmark::kMillisecond);

void BM_EstimateEffect(benchmark::State& state) {
  const SimulatedStudy s = build_study(bench_config(50'000, 5), 0);
  const Eigen::VectorXd w = stabilized_weights(s.z, propensity_scores(s.x_observed, s.z));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_effect(s.z, s.y_star, w));
}
BENCHMARK(BM_EstimateEffect)->Unit(benchmark::kMicrosecond);

void BM_FitSystematicErrorModel(benchmark::State& state) {
  RandomStream rng(1);
  std::vector<ControlEstimate> controls;
  const double truths[] = {0.0, std::log(1.5), std::log(2.0), std::log(4.0)};
  for (int i = 0; i < 4 * state.range(0); ++i) {
    const double t = truths[i % 4];
    controls.push_back({t + 0.1 + rng.normal(0.0, 0.1), 0.03, t});
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_systematic_error_model(controls));
}
BENCHMARK(BM_FitSystematicErrorModel)->Arg(5)->Arg(30)->Unit(benchmark::kMicrosecond);

void BM_CalibrateCi(benchmark::State& state) {
  SystematicErrorModel m;
  m.kind = ErrorModelKind::Full;
  m.mean_intercept = 0.1;
  m.mean_slope = 0.05;
  m.log_sd_intercept = std::log(0.1);
  m.log_sd_slope = 0.3;
  const EffectEstimate e{0.4, 0.05, {}};
  for (auto _ : state) benchmark::DoNotOptimize(calibrate_ci(e, m));
}
BENCHMARK(BM_CalibrateCi)->Unit(benchmark::kMicrosecond);

void BM_RunIteration(benchmark::State& state) {
  const ScenarioConfig c = bench_config(20'000, static_cast<int>(state.range(0)));
  int it = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_iteration(c, it++));
}
BENCHMARK(BM_RunIteration)->Arg(5)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
