#include "empcal/controls.hpp"

#include <cmath>
#include <string>

#include "empcal/errors.hpp"

namespace empcal {

NegativeControlFit fit_negative_control(const SimulatedStudy& study, int s, const LogisticOptions& options) {
  if (s < 0 || s >= study.n_negative_controls()) {
    throw Error(ErrorKind::InvalidArgument, "negative control index " + std::to_string(s) + " out of range");
  }
  const Eigen::Index n = study.n();
  const Eigen::Index m = study.x_observed.cols();
  Eigen::MatrixXd design(n, m + 2);
  design.col(0).setOnes();
  design.col(1) = study.z;
  design.rightCols(m) = study.x_observed;

  const LogisticFit fit = fit_logistic(design, study.y_neg.col(s), nullptr, options);
  NegativeControlFit out;
  out.control_id = s;
  out.intercept_hat = fit.coefficients[0];
  out.bias_coef_hat = fit.coefficients[1];
  out.bias_coef_se = std::sqrt(fit.model_covariance(1, 1));
  out.slope_hats = fit.coefficients.tail(m);
  return out;
}

OutcomeModel positive_control_model(const NegativeControlFit& fit, double treatment_coef) {
  OutcomeModel model;
  model.intercept = fit.intercept_hat;
  model.slopes = fit.slope_hats;
  model.treatment = treatment_coef;
  return model;
}

PositiveControl synthesize_positive_control(const NegativeControlFit& fit, const SimulatedStudy& study,
                                            double theta_t, RandomStream& rng) {
  if (!(theta_t > 0.0) || !std::isfinite(theta_t)) {
    throw Error(ErrorKind::InvalidArgument, "positive-control target must be > 0");
  }
  const Eigen::VectorXd no_u;
  const OutcomeModel generating = positive_control_model(fit, theta_t + fit.bias_coef_hat);
  const OutcomeModel nominal = positive_control_model(fit, theta_t);

  PositiveControl pc;
  pc.source_control = fit.control_id;
  pc.target_effect = theta_t;
  pc.y_pos = gen_outcome(study.x_observed, no_u, study.z, generating, OutcomeForm::Linear, rng);
  pc.nominal_true_effect = true_marginal_effect(nominal, study.x_observed, no_u, OutcomeForm::Linear);
  return pc;
}

}  // namespace empcal
