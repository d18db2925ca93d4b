#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "empcal/config.hpp"
#include "empcal/random.hpp"

namespace empcal {

/// Which extra regressor, beyond the measured confounders, enters an
/// outcome's generating linear predictor.
enum class OutcomeForm { Linear, PlusU, PlusQuadratic, PlusInteraction };

OutcomeForm outcome_form(Scenario scenario);

/// Generating coefficients of one outcome model (log-odds units).
struct OutcomeModel {
  double intercept = 0.0;
  Eigen::VectorXd slopes;
  double treatment = 0.0;  // structural zero for negative controls
  double extra = 0.0;      // coefficient of U, X1^2 or X1*X2
};

struct CoefficientSet {
  double treatment_intercept = 0.0;
  Eigen::VectorXd treatment_slopes;
  double treatment_extra = 0.0;  // coefficient of U, X1^2 or X1*X2 in the treatment model
  OutcomeModel outcome;
  std::vector<OutcomeModel> negatives;
};

struct SimulatedStudy {
  Eigen::MatrixXd x_true;      // n x m, as generated
  Eigen::MatrixXd x_observed;  // what the analyst sees
  Eigen::VectorXd u;           // all zero unless UnmeasuredConfounder
  Eigen::VectorXd z;           // 0/1
  Eigen::VectorXd y_star;      // 0/1
  Eigen::MatrixXd y_neg;       // n x S, 0/1
  Eigen::VectorXd true_ps;
  CoefficientSet truth;
  OutcomeForm form = OutcomeForm::Linear;
  double theta_true = 0.0;
  // Measurement-error bookkeeping; target_col < 0 when not applied.
  int me_target_col = -1;
  double me_mean = 0.0;
  double me_sd = 0.0;

  Eigen::Index n() const { return z.size(); }
  Eigen::Index n_negative_controls() const { return y_neg.cols(); }
};

CoefficientSet sample_coefficients(const ScenarioConfig& config, RandomStream& rng);

Eigen::MatrixXd gen_confounders(Eigen::Index n, Eigen::Index m, RandomStream& rng);

struct TreatmentDraw {
  Eigen::VectorXd z;
  Eigen::VectorXd true_ps;
};

/// `u` may be empty unless `form` is PlusU with a nonzero extra coefficient.
TreatmentDraw gen_treatment(const Eigen::MatrixXd& x, const Eigen::VectorXd& u,
                            const CoefficientSet& coefs, OutcomeForm form, RandomStream& rng);

/// Linear predictor of an outcome model at the given treatment vector.
Eigen::VectorXd outcome_linear_predictor(const Eigen::MatrixXd& x, const Eigen::VectorXd& u,
                                         const Eigen::VectorXd& z, const OutcomeModel& model,
                                         OutcomeForm form);

/// Same, for every subject set to a common treatment value.
Eigen::VectorXd outcome_linear_predictor(const Eigen::MatrixXd& x, const Eigen::VectorXd& u,
                                         double z, const OutcomeModel& model, OutcomeForm form);

/// Y_i ~ Bernoulli(logistic(eta_i)). Negative controls pass a model whose
/// treatment coefficient is zero, and then `z` is never read.
Eigen::VectorXd gen_outcome(const Eigen::MatrixXd& x, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& z, const OutcomeModel& model, OutcomeForm form,
                            RandomStream& rng);

/// Deterministic assignment outside [lower, upper]. Throws InvalidArgument
/// unless 0 < lower < upper < 1.
TreatmentDraw apply_positivity_violation(TreatmentDraw draw, double lower, double upper);

/// Adds N(mean, sd^2) noise to one column. Throws InvalidArgument for
/// mean <= 0, sd < 0 or a column out of range.
Eigen::MatrixXd apply_measurement_error(const Eigen::MatrixXd& x_true, Eigen::Index target_col,
                                        double mean, double sd, RandomStream& rng);

/// Marginal log odds ratio of the generating model: the log odds ratio of
/// the average counterfactual risks under Z=1 and Z=0. Throws
/// InvalidArgument if either average risk is exactly 0 or 1.
double true_marginal_effect(const OutcomeModel& model, const Eigen::MatrixXd& x,
                            const Eigen::VectorXd& u, OutcomeForm form);

/// One simulation iteration. All randomness comes from streams derived from
/// (config.seed, iteration).
SimulatedStudy build_study(const ScenarioConfig& config, int iteration);

double logistic(double eta);

}  // namespace empcal
