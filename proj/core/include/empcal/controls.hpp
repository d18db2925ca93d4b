#pragma once

#include <Eigen/Dense>

#include "empcal/logistic.hpp"
#include "empcal/random.hpp"
#include "empcal/scenario.hpp"

namespace empcal {

/// Unweighted fit of one negative-control outcome on [1, z, x_observed].
struct NegativeControlFit {
  int control_id = 0;
  double intercept_hat = 0.0;
  Eigen::VectorXd slope_hats;
  /// Coefficient on z; nonzero indicates residual bias.
  double bias_coef_hat = 0.0;
  double bias_coef_se = 0.0;
};

struct PositiveControl {
  int source_control = 0;
  double target_effect = 0.0;
  Eigen::VectorXd y_pos;
  /// Marginal log odds ratio of the generating model with treatment
  /// coefficient target_effect alone (the carried bias is not truth).
  double nominal_true_effect = 0.0;
};

NegativeControlFit fit_negative_control(const SimulatedStudy& study, int s,
                                        const LogisticOptions& options = {});

/// Outcome model that generates positive controls from `fit`, with the
/// given treatment coefficient.
OutcomeModel positive_control_model(const NegativeControlFit& fit, double treatment_coef);

/// y_pos ~ Bernoulli(logistic(intercept + (theta_t + bias)*z + slopes'x_obs)).
/// Throws InvalidArgument unless theta_t > 0.
PositiveControl synthesize_positive_control(const NegativeControlFit& fit, const SimulatedStudy& study,
                                            double theta_t, RandomStream& rng);

}  // namespace empcal
