#include "empcal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <mutex>
#include <thread>

#include "empcal/controls.hpp"
#include "empcal/scenario.hpp"

namespace empcal {
namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

IterationError::IterationError(ErrorKind kind, int iteration, const std::string& message)
    : Error(kind, "iteration " + std::to_string(iteration) + ": " + message), iteration_(iteration) {}

IterationAnalysis analyze_iteration(const ScenarioConfig& config, int iteration) {
  const SimulatedStudy study = build_study(config, iteration);

  // One set of weights serves every outcome: all share z and x_observed.
  const Eigen::VectorXd ps = propensity_scores(study.x_observed, study.z);
  const Eigen::VectorXd w = stabilized_weights(study.z, ps, config.weight_truncation);

  IterationAnalysis a;
  a.iteration = iteration;
  a.theta_true = study.theta_true;
  a.outcome = estimate_effect(study.z, study.y_star, w, OutcomeId{OutcomeKind::OutcomeOfInterest});

  const int n_neg = static_cast<int>(study.n_negative_controls());
  a.negatives.reserve(static_cast<std::size_t>(n_neg));
  for (int s = 0; s < n_neg; ++s) {
    const EffectEstimate e =
        estimate_effect(study.z, study.y_neg.col(s), w, OutcomeId{OutcomeKind::NegativeControl, s});
    a.negatives.push_back(ControlEstimate{e.theta_hat, e.se_hat, 0.0});
  }

  if (config.error_model == ErrorModelKind::Full) {
    const auto it = static_cast<std::uint64_t>(iteration);
    const auto n_targets = config.positive_control_targets.size();
    a.positives.reserve(static_cast<std::size_t>(n_neg) * n_targets);
    for (int s = 0; s < n_neg; ++s) {
      const NegativeControlFit fit = fit_negative_control(study, s);
      for (std::size_t k = 0; k < n_targets; ++k) {
        const double target = config.positive_control_targets[k];
        auto rng = RandomStream::derive(
            config.seed, {it, static_cast<std::uint64_t>(StreamTag::PositiveControl),
                          static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(k)});
        const PositiveControl pc = synthesize_positive_control(fit, study, target, rng);
        const EffectEstimate e =
            estimate_effect(study.z, pc.y_pos, w, OutcomeId{OutcomeKind::PositiveControl, s, target});
        a.positives.push_back(ControlEstimate{e.theta_hat, e.se_hat, pc.nominal_true_effect});
        a.positive_sources.push_back(s);
      }
    }
  }
  return a;
}

IterationRecord calibrate_iteration(const IterationAnalysis& a, ErrorModelKind kind, double alpha,
                                    std::optional<int> max_negatives) {
  const int keep = max_negatives ? std::min<int>(*max_negatives, static_cast<int>(a.negatives.size()))
                                 : static_cast<int>(a.negatives.size());
  std::vector<ControlEstimate> controls(a.negatives.begin(), a.negatives.begin() + keep);
  SystematicErrorModel model;
  if (kind == ErrorModelKind::Null) {
    model = fit_null_model(controls);
  } else {
    for (std::size_t i = 0; i < a.positives.size(); ++i) {
      if (a.positive_sources[i] < keep) controls.push_back(a.positives[i]);
    }
    model = fit_systematic_error_model(controls);
  }

  IterationRecord r;
  r.iteration = a.iteration;
  r.theta_true = a.theta_true;
  r.uncal = wald_interval(a.outcome.theta_hat, a.outcome.se_hat, alpha);
  r.cal = calibrate_ci(a.outcome, model, alpha);

  int covered = 0;
  for (const auto& c : controls) {
    const CalibratedEstimate ce = calibrate_ci(EffectEstimate{c.theta_hat, c.se_hat, {}}, model, alpha);
    if (ce.ci_low <= c.true_effect && c.true_effect <= ce.ci_high) ++covered;
  }
  r.control_cal_coverage = static_cast<double>(covered) / static_cast<double>(controls.size());
  return r;
}

IterationRecord run_iteration(const ScenarioConfig& config, int iteration) {
  try {
    return calibrate_iteration(analyze_iteration(config, iteration), config.error_model, config.alpha);
  } catch (const IterationError&) {
    throw;
  } catch (const Error& e) {
    std::string message = e.what();
    const std::string prefix = std::string(to_string(e.kind())) + ": ";
    if (message.starts_with(prefix)) message.erase(0, prefix.size());
    throw IterationError(e.kind(), iteration, message);
  }
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::clamp(threads, 1, std::max(count, 1));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();
  ScenarioResult result;
  result.manifest.config = config;
  result.manifest.threads = std::max(1, options.threads);
  result.manifest.started = utc_timestamp();

  const int total = config.n_iterations;
  result.records.resize(static_cast<std::size_t>(total));
  std::atomic<int> done{0};
  parallel_for(total, options.threads, [&](int i) {
    IterationRecord& slot = result.records[static_cast<std::size_t>(i)];
    try {
      slot = run_iteration(config, i);
    } catch (const IterationError& e) {
      slot = IterationRecord{};
      slot.iteration = i;
      slot.failure = e.kind();
      slot.failure_message = e.what();
    }
    const int finished = ++done;
    if (options.progress) options.progress(finished, total);
  });

  for (const auto& r : result.records) {
    if (r.failed()) {
      result.manifest.failures.push_back(FailureEntry{r.iteration, *r.failure, r.failure_message});
    } else if (!std::isfinite(r.cal.ci_low) || !std::isfinite(r.cal.ci_high)) {
      result.manifest.unbounded_intervals.push_back(r.iteration);
    }
  }
  const auto n_failed = static_cast<double>(result.manifest.failures.size());
  result.manifest.aborted = n_failed > kMaxFailureFraction * static_cast<double>(total);
  if (n_failed < total) result.summary = summarize(result.records, config.standardization);
  result.manifest.finished = utc_timestamp();
  return result;
}

}  // namespace empcal
