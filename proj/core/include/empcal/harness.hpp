#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "empcal/calibrator.hpp"
#include "empcal/config.hpp"
#include "empcal/errors.hpp"
#include "empcal/estimator.hpp"
#include "empcal/metrics.hpp"

namespace empcal {

inline constexpr const char* kToolVersion = "0.1.0";

/// Sub-module error tagged with the iteration that raised it.
class IterationError : public Error {
 public:
  IterationError(ErrorKind kind, int iteration, const std::string& message);
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

/// Everything estimated in one iteration, before calibration.
struct IterationAnalysis {
  int iteration = 0;
  double theta_true = 0.0;
  EffectEstimate outcome;
  std::vector<ControlEstimate> negatives;
  std::vector<ControlEstimate> positives;  // empty for the null model
  std::vector<int> positive_sources;       // negative control each positive came from
};

/// Simulate, weight, estimate the outcome of interest and every control.
/// Positive controls are synthesized only when config.error_model is Full.
IterationAnalysis analyze_iteration(const ScenarioConfig& config, int iteration);

/// Fit the error model of the requested kind from the analysis's controls
/// and calibrate the outcome of interest. The null model uses the negatives
/// only; `max_negatives` restricts both kinds to the first k negatives (and
/// the positives synthesized from them).
IterationRecord calibrate_iteration(const IterationAnalysis& analysis, ErrorModelKind kind,
                                    double alpha = 0.05, std::optional<int> max_negatives = std::nullopt);

/// analyze_iteration + calibrate_iteration with the configured model.
/// Errors are rethrown as IterationError.
IterationRecord run_iteration(const ScenarioConfig& config, int iteration);

struct FailureEntry {
  int iteration = 0;
  ErrorKind kind = ErrorKind::InvalidArgument;
  std::string message;
};

struct RunManifest {
  ScenarioConfig config;
  std::string tool_version = kToolVersion;
  std::string started;
  std::string finished;
  int threads = 1;
  std::vector<FailureEntry> failures;
  /// Iterations whose calibrated interval is unbounded on at least one side.
  std::vector<int> unbounded_intervals;
  bool aborted = false;  // more than 20% of iterations failed
};

struct ScenarioResult {
  std::optional<ScenarioSummary> summary;  // empty only if nothing succeeded
  std::vector<IterationRecord> records;    // one per iteration, failed ones flagged
  RunManifest manifest;
};

struct RunOptions {
  int threads = 1;
  /// Called from worker threads after each iteration with (done, total).
  std::function<void(int, int)> progress;
};

/// Maximum tolerated failure fraction before a run is marked aborted.
inline constexpr double kMaxFailureFraction = 0.2;

/// Runs every iteration (in parallel when threads > 1) and aggregates.
/// Results do not depend on the thread count.
ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Applies `fn` to 0..count-1 on `threads` workers; fn must be thread-safe.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace empcal
