#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "empcal/errors.hpp"
#include "empcal/metrics.hpp"
#include "empcal/random.hpp"

namespace empcal {
namespace {

IterationRecord record(int iteration, double truth, double theta, double se, double cal_theta, double cal_se) {
  IterationRecord r;
  r.iteration = iteration;
  r.theta_true = truth;
  r.uncal = wald_interval(theta, se);
  const WaldInterval w = wald_interval(cal_theta, cal_se);
  r.cal = CalibratedEstimate{cal_theta, w.ci_low, w.ci_high, cal_se, 1.0};
  r.control_cal_coverage = 1.0;
  return r;
}

std::vector<IterationRecord> random_records(std::uint64_t seed, int count) {
  RandomStream rng(seed);
  std::vector<IterationRecord> out;
  for (int i = 0; i < count; ++i) {
    const double truth = rng.uniform(-0.5, 0.5);
    const double se = rng.uniform(0.05, 0.2);
    const double theta = truth + rng.normal(0.1, 0.2);
    out.push_back(record(i, truth, theta, se, theta - 0.1, se * rng.uniform(1.0, 3.0)));
    out.back().control_cal_coverage = rng.uniform();
  }
  return out;
}

TEST(WaldInterval, ExactQuantile) {
  const WaldInterval w = wald_interval(0.0, 0.1);
  EXPECT_NEAR(w.ci_high - w.ci_low, 2.0 * 1.959963984540054 * 0.1, 1e-12);
  EXPECT_NEAR(w.ci_high - w.ci_low, 0.392, 1e-4);
}

TEST(Metrics, CoverageExamples) {
  std::vector<IterationRecord> rs;
  for (int i = 0; i < 4; ++i) rs.push_back(record(i, 0.0, i < 3 ? 0.0 : 1.0, 0.1, 0.0, 0.1));
  EXPECT_DOUBLE_EQ(coverage(rs, Arm::Uncalibrated), 0.75);
  EXPECT_DOUBLE_EQ(coverage(rs, Arm::Calibrated), 1.0);
  // Endpoint exactly on the truth counts as covered.
  IterationRecord edge = record(9, 0.0, 0.0, 0.1, 0.0, 0.1);
  edge.uncal.ci_low = 0.0;
  const std::vector<IterationRecord> one{edge};
  EXPECT_DOUBLE_EQ(coverage(one, Arm::Uncalibrated), 1.0);
}

TEST(Metrics, StandardizedAbsBiasExamples) {
  const std::vector<IterationRecord> rs{record(0, 0.0, 0.2, 0.1, 0.1, 0.2), record(1, 0.0, -0.4, 0.1, 0.0, 0.2)};
  EXPECT_DOUBLE_EQ(mean_standardized_abs_bias(rs, Arm::Uncalibrated), 3.0);
  EXPECT_DOUBLE_EQ(mean_standardized_abs_bias(rs, Arm::Calibrated), 0.25);
  EXPECT_DOUBLE_EQ(mean_standardized_abs_bias(rs, Arm::Calibrated, BiasStandardization::UncalibratedSe), 0.5);
  EXPECT_DOUBLE_EQ(mean_bias(rs, Arm::Uncalibrated), -0.1);
}

TEST(Metrics, WidthAndDegeneracy) {
  const std::vector<IterationRecord> rs{record(0, 0.0, 0.3, 0.1, 0.3, 0.1)};
  EXPECT_NEAR(mean_ci_width(rs, Arm::Uncalibrated), 0.39199, 1e-5);
  EXPECT_DOUBLE_EQ(mean_ci_width(rs, Arm::Uncalibrated), mean_ci_width(rs, Arm::Calibrated));
  EXPECT_DOUBLE_EQ(coverage(rs, Arm::Uncalibrated), coverage(rs, Arm::Calibrated));
}

TEST(Metrics, BiasMcse) {
  const std::vector<IterationRecord> rs{record(0, 0.0, 0.1, 0.1, 0, 0.1), record(1, 0.0, 0.3, 0.1, 0, 0.1)};
  // sd of {0.1, 0.3} is sqrt(0.02); mcse = sd / sqrt(2) = 0.1.
  EXPECT_NEAR(bias_mcse(rs, Arm::Uncalibrated), 0.1, 1e-12);
}

TEST(Metrics, FunnelRows) {
  const auto rs = random_records(1, 30);
  const auto rows = build_funnel_rows(rs);
  ASSERT_EQ(rows.size(), 60u);
  int significant_uncal = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& row = rows[k];
    const auto& r = rs[k / 2];
    EXPECT_EQ(row.iteration, r.iteration);
    EXPECT_EQ(row.arm, k % 2 == 0 ? Arm::Uncalibrated : Arm::Calibrated);
    if (row.arm == Arm::Uncalibrated) {
      // Wald identity: significant iff |bias| / se exceeds the quantile.
      EXPECT_EQ(row.significant, std::abs(row.bias) / row.se > 1.959963984540054);
      significant_uncal += row.significant;
    }
  }
  EXPECT_DOUBLE_EQ(significant_uncal / 30.0, 1.0 - coverage(rs, Arm::Uncalibrated));
}

TEST(Metrics, OrderInvariance) {
  auto rs = random_records(2, 50);
  const ScenarioSummary a = summarize(rs);
  std::mt19937 shuffle_rng(7);
  std::shuffle(rs.begin(), rs.end(), shuffle_rng);
  const ScenarioSummary b = summarize(rs);
  EXPECT_EQ(a.coverage_cal, b.coverage_cal);
  EXPECT_EQ(a.mean_std_abs_bias_uncal, b.mean_std_abs_bias_uncal);
  EXPECT_EQ(a.mean_ci_width_cal, b.mean_ci_width_cal);
  EXPECT_EQ(a.bias_mcse_cal, b.bias_mcse_cal);
  EXPECT_EQ(a.control_cal_coverage, b.control_cal_coverage);
}

TEST(Metrics, FailedRecordsExcluded) {
  auto rs = random_records(3, 20);
  const ScenarioSummary clean = summarize(rs);
  IterationRecord bad = record(99, 0.0, 50.0, 0.1, 50.0, 0.1);
  bad.failure = ErrorKind::SeparationDetected;
  rs.push_back(bad);
  const ScenarioSummary with_bad = summarize(rs);
  EXPECT_EQ(with_bad.mean_bias_uncal, clean.mean_bias_uncal);
  EXPECT_EQ(with_bad.n_iterations_used, 20);
  EXPECT_EQ(with_bad.n_failed, 1);
}

TEST(Metrics, EmptyInput) {
  std::vector<IterationRecord> none;
  EXPECT_THROW(coverage(none, Arm::Calibrated), Error);
  IterationRecord bad;
  bad.failure = ErrorKind::AllOneArm;
  none.push_back(bad);
  try {
    summarize(none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
  }
}

TEST(Metrics, ContainmentImpliesCoverageOrder) {
  RandomStream rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<IterationRecord> rs;
    for (int i = 0; i < 40; ++i) {
      const double truth = rng.uniform(-1, 1);
      const double theta = truth + rng.normal(0.0, 0.3);
      IterationRecord r = record(i, truth, theta, 0.1, theta, 0.1);
      r.cal.ci_low = r.uncal.ci_low - rng.uniform(0, 0.5);
      r.cal.ci_high = r.uncal.ci_high + rng.uniform(0, 0.5);
      rs.push_back(r);
    }
    EXPECT_GE(coverage(rs, Arm::Calibrated), coverage(rs, Arm::Uncalibrated));
  }
}

}  // namespace
}  // namespace empcal
