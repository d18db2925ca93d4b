#include "empcal/calibrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/tools/roots.hpp>

#include "empcal/errors.hpp"
#include "empcal/random.hpp"
#include "empcal/simplex.hpp"

namespace empcal {
namespace {

constexpr int kRestarts = 8;
constexpr std::uint64_t kJitterSeed = 0xca1b7a7e;
constexpr double kRootTolerance = 1e-10;
constexpr double kFirstOffset = 1e-4;
constexpr double kMaxOffset = 1e4;

double upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }
double lower_tail(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_normal_density(double x, double mean, double var) {
  const double r = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + r * r / var);
}

void check_controls(std::span<const ControlEstimate> controls) {
  if (controls.size() < 2) throw Error(ErrorKind::TooFewControls, "at least 2 controls are required");
  for (const auto& c : controls) {
    if (!std::isfinite(c.theta_hat) || !std::isfinite(c.true_effect) || !(c.se_hat > 0.0) ||
        !std::isfinite(c.se_hat)) {
      throw Error(ErrorKind::InvalidArgument, "control estimates need finite values and se > 0");
    }
  }
}

// Simplex search from `start`, then restarts jittered around the incumbent.
SimplexResult fit_with_restarts(const std::function<double(const Eigen::VectorXd&)>& objective,
                                const Eigen::VectorXd& start, const Eigen::VectorXd& step) {
  SimplexOptions options;
  options.ftol = 1e-10;
  options.xtol = 1e-9;
  SimplexResult best = minimize_simplex(objective, start, step, options);
  RandomStream jitter(kJitterSeed);
  for (int r = 0; r < kRestarts; ++r) {
    Eigen::VectorXd from = best.x;
    for (Eigen::Index j = 0; j < from.size(); ++j) from[j] += step[j] * jitter.normal();
    SimplexResult trial = minimize_simplex(objective, from, step, options);
    if (trial.value < best.value) best = std::move(trial);
  }
  // Final polish restarted at the incumbent with a fresh simplex.
  SimplexResult polished = minimize_simplex(objective, best.x, 0.1 * step, options);
  if (polished.value <= best.value) best = std::move(polished);
  if (!std::isfinite(best.value)) {
    throw Error(ErrorKind::OptimizationFailed, "systematic error likelihood is not finite at the optimum");
  }
  return best;
}

}  // namespace

double SystematicErrorModel::bias_sd(double theta) const {
  return std::exp(log_sd_intercept + log_sd_slope * std::abs(theta));
}

double SystematicErrorModel::log_likelihood(std::span<const ControlEstimate> controls) const {
  double ll = 0.0;
  for (const auto& c : controls) {
    const double sd = std::max(bias_sd(c.true_effect), kMinBiasSd);
    ll += log_normal_density(c.theta_hat, c.true_effect + bias_mean(c.true_effect),
                             sd * sd + c.se_hat * c.se_hat);
  }
  return ll;
}

double two_sided_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - alpha / 2.0);
}

SystematicErrorModel fit_null_model(std::span<const ControlEstimate> negatives) {
  check_controls(negatives);
  double wsum = 0.0;
  double mean = 0.0;
  for (const auto& c : negatives) {
    const double w = 1.0 / (c.se_hat * c.se_hat);
    wsum += w;
    mean += w * c.theta_hat;
  }
  mean /= wsum;
  double spread = 0.0;
  for (const auto& c : negatives) spread += (c.theta_hat - mean) * (c.theta_hat - mean);
  spread = std::sqrt(spread / static_cast<double>(negatives.size()));

  const double log_floor = std::log(kMinBiasSd);
  const auto objective = [&](const Eigen::VectorXd& p) {
    SystematicErrorModel m;
    m.mean_intercept = p[0];
    m.log_sd_intercept = std::max(p[1], log_floor);
    return -m.log_likelihood(negatives);
  };
  const Eigen::Vector2d start(mean, std::log(std::max(spread, 1e-2)));
  const Eigen::Vector2d step(0.1, 1.0);
  const SimplexResult best = fit_with_restarts(objective, start, step);

  SystematicErrorModel model;
  model.kind = ErrorModelKind::Null;
  model.mean_intercept = best.x[0];
  model.log_sd_intercept = std::max(best.x[1], log_floor);
  return model;
}

SystematicErrorModel fit_systematic_error_model(std::span<const ControlEstimate> controls) {
  check_controls(controls);
  const auto [lo, hi] = std::minmax_element(controls.begin(), controls.end(), [](const auto& a, const auto& b) {
    return a.true_effect < b.true_effect;
  });
  if (hi->true_effect - lo->true_effect < 1e-12) {
    throw Error(ErrorKind::InsufficientEffectSpread, "all controls share one true effect");
  }

  // Start from a precision-weighted least-squares line through the errors.
  double sw = 0, st = 0, sr = 0, stt = 0, str = 0;
  for (const auto& c : controls) {
    const double w = 1.0 / (c.se_hat * c.se_hat);
    const double r = c.theta_hat - c.true_effect;
    sw += w;
    st += w * c.true_effect;
    sr += w * r;
    stt += w * c.true_effect * c.true_effect;
    str += w * c.true_effect * r;
  }
  const double denom = sw * stt - st * st;
  const double b0 = denom > 0 ? (sw * str - st * sr) / denom : 0.0;
  const double a0 = (sr - b0 * st) / sw;
  double rss = 0.0;
  for (const auto& c : controls) {
    const double r = c.theta_hat - c.true_effect - a0 - b0 * c.true_effect;
    rss += r * r;
  }
  const double spread = std::sqrt(rss / static_cast<double>(controls.size()));

  const auto to_model = [](const Eigen::VectorXd& p) {
    SystematicErrorModel m;
    m.kind = ErrorModelKind::Full;
    m.mean_intercept = p[0];
    m.mean_slope = p[1];
    m.log_sd_intercept = p[2];
    m.log_sd_slope = p[3];
    return m;
  };
  const auto objective = [&](const Eigen::VectorXd& p) { return -to_model(p).log_likelihood(controls); };
  const Eigen::Vector4d start(a0, b0, std::log(std::max(spread, 1e-2)), 0.0);
  const Eigen::Vector4d step(0.1, 0.1, 1.0, 0.5);
  const SimplexResult best = fit_with_restarts(objective, start, step);

  SystematicErrorModel model = to_model(best.x);
  // Below the floor only the product c + d|theta| matters; report the
  // floored intercept when the slope is inert.
  if (model.log_sd_slope == 0.0) model.log_sd_intercept = std::max(model.log_sd_intercept, std::log(kMinBiasSd));
  return model;
}

CalibratedEstimate calibrate_ci(const EffectEstimate& estimate, const SystematicErrorModel& model,
                                double alpha) {
  const double z = two_sided_quantile(alpha);
  if (!(model.mean_slope > -1.0)) {
    throw Error(ErrorKind::InvalidArgument, "calibration requires a mean slope b > -1");
  }
  if (!(estimate.se_hat > 0.0) || !std::isfinite(estimate.theta_hat)) {
    throw Error(ErrorKind::InvalidArgument, "calibration requires a finite estimate with se > 0");
  }
  const double obs = estimate.theta_hat;
  const double tau2 = estimate.se_hat * estimate.se_hat;
  const auto standardized = [&](double theta) {
    const double sd = model.bias_sd(theta);
    return (obs - theta - model.bias_mean(theta)) / std::sqrt(sd * sd + tau2);
  };

  CalibratedEstimate out;
  out.theta_cal = (obs - model.mean_intercept) / (1.0 + model.mean_slope);

  // P(theta_hat >= obs | theta) rises with theta; P(theta_hat <= obs | theta) falls.
  const auto lower_eq = [&](double theta) { return upper_tail(standardized(theta)) - alpha / 2.0; };
  const auto upper_eq = [&](double theta) { return lower_tail(standardized(theta)) - alpha / 2.0; };

  // Walk outward from theta_cal on a geometric grid to the first sign
  // change, then bisect inside it. With d > 0 the predictive sd grows without
  // bound, so a tail probability can return toward 1/2 far from the estimate;
  // the endpoint nearest the estimate is the one reported. When the tail never
  // reaches alpha/2 the confidence set is unbounded on that side.
  const auto solve = [&](const auto& eq, double direction) {
    if (!(eq(out.theta_cal) > 0.0)) {
      throw Error(ErrorKind::NonMonotonePredictive, "tail probability at the calibrated estimate is below alpha/2");
    }
    double near = out.theta_cal;
    for (double offset = kFirstOffset; offset <= kMaxOffset; offset *= 2.0) {
      const double far = out.theta_cal + direction * offset;
      if (eq(far) < 0.0) {
        const double a = std::min(near, far);
        const double b = std::max(near, far);
        std::uintmax_t max_iter = 200;
        const auto [r0, r1] = boost::math::tools::bisect(
            eq, a, b, [](double x, double y) { return std::abs(y - x) <= kRootTolerance; }, max_iter);
        return 0.5 * (r0 + r1);
      }
      near = far;
    }
    return direction * std::numeric_limits<double>::infinity();
  };
  out.ci_low = solve(lower_eq, -1.0);
  out.ci_high = solve(upper_eq, +1.0);
  out.se_cal = (out.ci_high - out.ci_low) / (2.0 * z);

  const double z0 = standardized(0.0);
  out.p_cal = std::min(1.0, std::erfc(std::abs(z0) / std::numbers::sqrt2));
  return out;
}

double calibrate_pvalue(const EffectEstimate& estimate, const SystematicErrorModel& null_model) {
  if (null_model.kind != ErrorModelKind::Null) {
    throw Error(ErrorKind::InvalidArgument, "p-value calibration uses the null error model");
  }
  const double sigma = std::exp(null_model.log_sd_intercept);
  const double scale = std::sqrt(sigma * sigma + estimate.se_hat * estimate.se_hat);
  const double stat = std::abs(estimate.theta_hat - null_model.mean_intercept) / scale;
  return std::min(1.0, std::erfc(stat / std::numbers::sqrt2));
}

}  // namespace empcal
