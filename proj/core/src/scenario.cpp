#include "empcal/scenario.hpp"

#include <cmath>
#include <string>

#include "empcal/errors.hpp"

namespace empcal {

double logistic(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

OutcomeForm outcome_form(Scenario scenario) {
  switch (scenario) {
    case Scenario::UnmeasuredConfounder: return OutcomeForm::PlusU;
    case Scenario::QuadraticTerm: return OutcomeForm::PlusQuadratic;
    case Scenario::InteractionTerm: return OutcomeForm::PlusInteraction;
    default: return OutcomeForm::Linear;
  }
}

CoefficientSet sample_coefficients(const ScenarioConfig& config, RandomStream& rng) {
  const auto m = static_cast<Eigen::Index>(config.n_confounders);
  const auto draw = [&] { return rng.uniform(config.coef_low, config.coef_high); };
  const auto draw_vector = [&] {
    Eigen::VectorXd v(m);
    for (Eigen::Index j = 0; j < m; ++j) v[j] = draw();
    return v;
  };
  const OutcomeForm form = outcome_form(config.scenario);

  // Every coefficient is drawn whether or not the scenario uses it, so the
  // stream position of each draw is the same across scenarios.
  CoefficientSet c;
  c.treatment_intercept = draw();
  c.treatment_slopes = draw_vector();
  c.treatment_extra = draw();
  c.outcome.intercept = draw();
  c.outcome.slopes = draw_vector();
  c.outcome.treatment = draw();
  c.outcome.extra = draw();

  c.negatives.resize(static_cast<std::size_t>(config.n_negative_controls));
  for (auto& neg : c.negatives) {
    neg.intercept = draw();
    neg.slopes = draw_vector();
    neg.extra = draw();
    neg.treatment = 0.0;
  }

  const bool extra_confounds =
      form == OutcomeForm::PlusU || (form != OutcomeForm::Linear && config.misspecified_treatment);
  if (!extra_confounds) c.treatment_extra = 0.0;
  if (form == OutcomeForm::Linear) {
    c.outcome.extra = 0.0;
    for (auto& neg : c.negatives) neg.extra = 0.0;
  }

  for (auto& neg : c.negatives) {
    switch (config.suitability) {
      case Suitability::IdealSuitable:
        neg.slopes = c.outcome.slopes;
        neg.extra = c.outcome.extra;
        break;
      case Suitability::RandomSuitable:
        break;
      case Suitability::Unsuitable:
        neg.extra = 0.0;
        // Without a bias term to withhold, unsuitable controls under
        // non-positivity share no pathway at all: intercept only.
        if (config.scenario == Scenario::NonPositivity) neg.slopes.setZero();
        break;
    }
  }
  return c;
}

Eigen::MatrixXd gen_confounders(Eigen::Index n, Eigen::Index m, RandomStream& rng) {
  Eigen::MatrixXd x(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) x(i, j) = rng.normal();
  }
  return x;
}

namespace {

void add_extra_term(Eigen::VectorXd& eta, const Eigen::MatrixXd& x, const Eigen::VectorXd& u,
                    double coef, OutcomeForm form) {
  if (coef == 0.0) return;
  switch (form) {
    case OutcomeForm::Linear:
      break;
    case OutcomeForm::PlusU:
      if (u.size() != eta.size()) throw Error(ErrorKind::InvalidArgument, "U required");
      eta += coef * u;
      break;
    case OutcomeForm::PlusQuadratic:
      eta.array() += coef * x.col(0).array().square();
      break;
    case OutcomeForm::PlusInteraction:
      if (x.cols() < 2) throw Error(ErrorKind::InvalidArgument, "interaction needs 2 columns");
      eta.array() += coef * x.col(0).array() * x.col(1).array();
      break;
  }
}

Eigen::VectorXd covariate_part(const Eigen::MatrixXd& x, const Eigen::VectorXd& u,
                               const OutcomeModel& model, OutcomeForm form) {
  if (model.slopes.size() != x.cols()) {
    throw Error(ErrorKind::InvalidArgument, "outcome: slope count does not match confounder columns");
  }
  Eigen::VectorXd eta = (x * model.slopes).array() + model.intercept;
  add_extra_term(eta, x, u, model.extra, form);
  return eta;
}

}  // namespace

TreatmentDraw gen_treatment(const Eigen::MatrixXd& x, const Eigen::VectorXd& u,
                            const CoefficientSet& coefs, OutcomeForm form, RandomStream& rng) {
  const Eigen::Index n = x.rows();
  Eigen::VectorXd eta = (x * coefs.treatment_slopes).array() + coefs.treatment_intercept;
  add_extra_term(eta, x, u, coefs.treatment_extra, form);
  TreatmentDraw out{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.true_ps[i] = logistic(eta[i]);
    out.z[i] = rng.bernoulli(out.true_ps[i]) ? 1.0 : 0.0;
  }
  return out;
}

Eigen::VectorXd outcome_linear_predictor(const Eigen::MatrixXd& x, const Eigen::VectorXd& u,
                                         const Eigen::VectorXd& z, const OutcomeModel& model,
                                         OutcomeForm form) {
  Eigen::VectorXd eta = covariate_part(x, u, model, form);
  if (model.treatment != 0.0) eta += model.treatment * z;
  return eta;
}

Eigen::VectorXd outcome_linear_predictor(const Eigen::MatrixXd& x, const Eigen::VectorXd& u,
                                         double z, const OutcomeModel& model, OutcomeForm form) {
  Eigen::VectorXd eta = covariate_part(x, u, model, form);
  eta.array() += model.treatment * z;
  return eta;
}

Eigen::VectorXd gen_outcome(const Eigen::MatrixXd& x, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& z, const OutcomeModel& model, OutcomeForm form,
                            RandomStream& rng) {
  const Eigen::VectorXd eta = outcome_linear_predictor(x, u, z, model, form);
  Eigen::VectorXd y(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) y[i] = rng.bernoulli(logistic(eta[i])) ? 1.0 : 0.0;
  return y;
}

TreatmentDraw apply_positivity_violation(TreatmentDraw draw, double lower, double upper) {
  if (!(lower > 0.0 && lower < upper && upper < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "positivity cutoffs must satisfy 0 < lower < upper < 1");
  }
  for (Eigen::Index i = 0; i < draw.true_ps.size(); ++i) {
    if (draw.true_ps[i] > upper) {
      draw.true_ps[i] = 1.0;
      draw.z[i] = 1.0;
    } else if (draw.true_ps[i] < lower) {
      draw.true_ps[i] = 0.0;
      draw.z[i] = 0.0;
    }
  }
  return draw;
}

Eigen::MatrixXd apply_measurement_error(const Eigen::MatrixXd& x_true, Eigen::Index target_col,
                                        double mean, double sd, RandomStream& rng) {
  if (!(mean > 0.0)) throw Error(ErrorKind::InvalidArgument, "measurement error mean must be > 0");
  if (!(sd >= 0.0)) throw Error(ErrorKind::InvalidArgument, "measurement error sd must be >= 0");
  if (target_col < 0 || target_col >= x_true.cols()) {
    throw Error(ErrorKind::InvalidArgument, "measurement error column out of range");
  }
  Eigen::MatrixXd x_obs = x_true;
  for (Eigen::Index i = 0; i < x_obs.rows(); ++i) x_obs(i, target_col) += mean + sd * rng.normal();
  return x_obs;
}

double true_marginal_effect(const OutcomeModel& model, const Eigen::MatrixXd& x,
                            const Eigen::VectorXd& u, OutcomeForm form) {
  if (model.treatment == 0.0) return 0.0;
  const Eigen::VectorXd base = covariate_part(x, u, model, form);
  double p1 = 0.0;
  double p0 = 0.0;
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    p1 += logistic(base[i] + model.treatment);
    p0 += logistic(base[i]);
  }
  const auto n = static_cast<double>(base.size());
  p1 /= n;
  p0 /= n;
  if (p1 <= 0.0 || p1 >= 1.0 || p0 <= 0.0 || p0 >= 1.0) {
    throw Error(ErrorKind::InvalidArgument, "true_marginal_effect: average risk is exactly 0 or 1");
  }
  return std::log(p1 / (1.0 - p1)) - std::log(p0 / (1.0 - p0));
}

SimulatedStudy build_study(const ScenarioConfig& config, int iteration) {
  config.validate();
  if (iteration < 0 || iteration >= config.n_iterations) {
    throw Error(ErrorKind::InvalidArgument,
                "iteration " + std::to_string(iteration) + " outside [0, n_iterations)");
  }
  const auto it = static_cast<std::uint64_t>(iteration);
  const auto stream = [&](StreamTag tag, std::uint64_t sub = 0) {
    return RandomStream::derive(config.seed, {it, static_cast<std::uint64_t>(tag), sub});
  };
  const Eigen::Index n = config.n_subjects;
  const Eigen::Index m = config.n_confounders;

  SimulatedStudy study;
  study.form = outcome_form(config.scenario);

  auto coef_rng = stream(StreamTag::Coefficients);
  study.truth = sample_coefficients(config, coef_rng);

  auto conf_rng = stream(StreamTag::Confounders);
  study.x_true = gen_confounders(n, m, conf_rng);

  study.u = Eigen::VectorXd::Zero(n);
  if (config.scenario == Scenario::UnmeasuredConfounder) {
    auto u_rng = stream(StreamTag::Unmeasured);
    for (Eigen::Index i = 0; i < n; ++i) study.u[i] = u_rng.normal();
  }

  auto treat_rng = stream(StreamTag::Treatment);
  TreatmentDraw treatment = gen_treatment(study.x_true, study.u, study.truth, study.form, treat_rng);
  if (config.scenario == Scenario::NonPositivity) {
    treatment = apply_positivity_violation(std::move(treatment), config.positivity_lower,
                                           config.positivity_upper);
  }
  study.z = std::move(treatment.z);
  study.true_ps = std::move(treatment.true_ps);

  auto outcome_rng = stream(StreamTag::OutcomeOfInterest);
  study.y_star = gen_outcome(study.x_true, study.u, study.z, study.truth.outcome, study.form, outcome_rng);

  const auto n_neg = static_cast<Eigen::Index>(study.truth.negatives.size());
  study.y_neg.resize(n, n_neg);
  for (Eigen::Index s = 0; s < n_neg; ++s) {
    auto neg_rng = stream(StreamTag::NegativeControl, static_cast<std::uint64_t>(s));
    study.y_neg.col(s) = gen_outcome(study.x_true, study.u, study.z,
                                     study.truth.negatives[static_cast<std::size_t>(s)], study.form,
                                     neg_rng);
  }

  if (config.scenario == Scenario::MeasurementError) {
    auto me_rng = stream(StreamTag::MeasurementError);
    study.me_mean = me_rng.uniform(config.me_mean_low, config.me_mean_high);
    study.me_sd = me_rng.uniform(config.me_sd_low, config.me_sd_high);
    const Eigen::VectorXd& effects = config.me_target == MeasurementErrorTarget::OutcomeModel
                                         ? study.truth.outcome.slopes
                                         : study.truth.treatment_slopes;
    Eigen::Index col = 0;
    effects.cwiseAbs().maxCoeff(&col);
    study.me_target_col = static_cast<int>(col);
    study.x_observed = apply_measurement_error(study.x_true, col, study.me_mean, study.me_sd, me_rng);
  } else {
    study.x_observed = study.x_true;
  }

  study.theta_true = true_marginal_effect(study.truth.outcome, study.x_true, study.u, study.form);
  return study;
}

}  // namespace empcal
