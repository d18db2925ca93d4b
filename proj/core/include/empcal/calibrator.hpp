#pragma once

#include <span>

#include "empcal/config.hpp"
#include "empcal/estimator.hpp"

namespace empcal {

/// Estimate for a control outcome with known true effect (0 for negatives).
struct ControlEstimate {
  double theta_hat = 0.0;
  double se_hat = 0.0;
  double true_effect = 0.0;
};

/// Lower bound on the systematic-error standard deviation during fitting;
/// keeps the likelihood bounded when the controls show no dispersion.
inline constexpr double kMinBiasSd = 1e-6;

/// Bias of an estimate whose true effect is theta is modelled as
/// Normal(a + b*theta, exp(c + d*|theta|)^2). The null model has b = d = 0.
struct SystematicErrorModel {
  double mean_intercept = 0.0;   // a
  double mean_slope = 0.0;       // b
  double log_sd_intercept = 0.0; // c
  double log_sd_slope = 0.0;     // d
  ErrorModelKind kind = ErrorModelKind::Null;

  double bias_mean(double theta) const { return mean_intercept + mean_slope * theta; }
  double bias_sd(double theta) const;

  /// Log-likelihood of the controls under this model.
  double log_likelihood(std::span<const ControlEstimate> controls) const;
};

struct CalibratedEstimate {
  double theta_cal = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double se_cal = 0.0;  // interval width / (2 z_{1-alpha/2})
  double p_cal = 1.0;   // two-sided, against a true effect of 0
};

/// Normal quantile z_{1 - alpha/2}.
double two_sided_quantile(double alpha);

/// Empirical null from negative controls: maximizes
/// sum log N(theta_hat_i; mu, sigma^2 + se_i^2) over (mu, log sigma).
/// Throws TooFewControls (< 2) or OptimizationFailed.
SystematicErrorModel fit_null_model(std::span<const ControlEstimate> negatives);

/// Full model from negative and positive controls by maximum likelihood over
/// (a, b, c, d), simplex search with jittered restarts.
/// Throws TooFewControls, InsufficientEffectSpread or OptimizationFailed.
SystematicErrorModel fit_systematic_error_model(std::span<const ControlEstimate> controls);

/// Inverts the predictive distribution of theta_hat given the true effect.
/// Each endpoint is the root of its tail equation nearest theta_cal; when a
/// tail probability never falls to alpha/2 on one side (possible when d > 0)
/// that endpoint is -inf or +inf. Throws InvalidArgument for b <= -1 or
/// alpha outside (0,1).
CalibratedEstimate calibrate_ci(const EffectEstimate& estimate, const SystematicErrorModel& model,
                                double alpha = 0.05);

/// 2 * (1 - Phi(|theta_hat - mu| / sqrt(sigma^2 + se^2))). Requires a null model.
double calibrate_pvalue(const EffectEstimate& estimate, const SystematicErrorModel& null_model);

}  // namespace empcal
