#pragma once

#include <optional>

#include <Eigen/Dense>

#include "empcal/logistic.hpp"

namespace empcal {

enum class OutcomeKind { OutcomeOfInterest, NegativeControl, PositiveControl };

struct OutcomeId {
  OutcomeKind kind = OutcomeKind::OutcomeOfInterest;
  int control = -1;          // s, for controls
  double target = 0.0;       // theta_t, for positive controls

  bool operator==(const OutcomeId&) const = default;
};

/// Log odds ratio estimate and its sandwich standard error.
struct EffectEstimate {
  double theta_hat = 0.0;
  double se_hat = 0.0;
  OutcomeId outcome;
};

/// [1 | x] design matrix.
Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x);

/// Fitted Pr(Z=1 | x) from a main-effects logistic model of z on the
/// observed confounders.
Eigen::VectorXd propensity_scores(const Eigen::MatrixXd& x_observed, const Eigen::VectorXd& z,
                                  const LogisticOptions& options = {});

/// w_i = P(Z = z_i) / P(Z = z_i | x_i), with P(Z=1) the sample prevalence.
/// `truncation_quantile` caps weights above that empirical quantile.
/// Throws DegenerateScore for scores outside the open unit interval.
Eigen::VectorXd stabilized_weights(const Eigen::VectorXd& z, const Eigen::VectorXd& ps,
                                   std::optional<double> truncation_quantile = std::nullopt);

/// Weighted logistic regression of y on [1, z]; theta_hat is the z
/// coefficient and se_hat the square root of its sandwich variance.
/// Throws AllOneArm when z is constant.
EffectEstimate estimate_effect(const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& w, OutcomeId outcome = {},
                               const LogisticOptions& options = {});

}  // namespace empcal
