#include "empcal/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "empcal/errors.hpp"

namespace empcal {

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd design(x.rows(), x.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(x.cols()) = x;
  return design;
}

Eigen::VectorXd propensity_scores(const Eigen::MatrixXd& x_observed, const Eigen::VectorXd& z,
                                  const LogisticOptions& options) {
  return fit_logistic(with_intercept(x_observed), z, nullptr, options).fitted;
}

Eigen::VectorXd stabilized_weights(const Eigen::VectorXd& z, const Eigen::VectorXd& ps,
                                   std::optional<double> truncation_quantile) {
  const Eigen::Index n = z.size();
  if (n == 0 || ps.size() != n) throw Error(ErrorKind::InvalidArgument, "stabilized_weights: size mismatch");
  const double prevalence = z.mean();
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(ps[i] > 0.0 && ps[i] < 1.0)) {
      throw Error(ErrorKind::DegenerateScore, "propensity score outside (0, 1)");
    }
    w[i] = z[i] > 0.5 ? prevalence / ps[i] : (1.0 - prevalence) / (1.0 - ps[i]);
  }
  if (truncation_quantile) {
    std::vector<double> sorted(w.data(), w.data() + n);
    const auto rank = static_cast<std::size_t>(
        std::ceil(*truncation_quantile * static_cast<double>(n))) - 1;
    const auto pos = sorted.begin() + static_cast<std::ptrdiff_t>(std::min(rank, sorted.size() - 1));
    std::nth_element(sorted.begin(), pos, sorted.end());
    w = w.cwiseMin(*pos);
  }
  return w;
}

// The model on [1, z] with binary z is saturated, so its weighted MLE puts
// each arm's fitted risk at that arm's weighted outcome mean. The sandwich
// then needs only per-arm sums; this matches fit_logistic without iterating.
EffectEstimate estimate_effect(const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& w, OutcomeId outcome,
                               const LogisticOptions& options) {
  const Eigen::Index n = z.size();
  if (y.size() != n || w.size() != n) throw Error(ErrorKind::InvalidArgument, "estimate_effect: size mismatch");
  if (!(w.array() > 0.0).all() || !w.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "estimate_effect: weights must be strictly positive and finite");
  }
  double wsum[2] = {0.0, 0.0};
  double wy[2] = {0.0, 0.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    if (z[i] != 0.0 && z[i] != 1.0) throw Error(ErrorKind::InvalidArgument, "estimate_effect: z must be 0/1");
    const int g = z[i] == 1.0 ? 1 : 0;
    wsum[g] += w[i];
    wy[g] += w[i] * y[i];
  }
  if (wsum[0] == 0.0 || wsum[1] == 0.0) throw Error(ErrorKind::AllOneArm, "treatment is constant");

  const double mu[2] = {wy[0] / wsum[0], wy[1] / wsum[1]};
  for (const double m : mu) {
    if (!(m > 0.0 && m < 1.0)) {
      throw Error(ErrorKind::SeparationDetected, "an arm has all outcomes equal; the log odds ratio is infinite");
    }
  }
  const double b0 = std::log(mu[0] / (1.0 - mu[0]));
  const double theta = std::log(mu[1] / (1.0 - mu[1])) - b0;
  if (std::abs(b0) > options.separation_threshold || std::abs(b0 + theta) > options.separation_threshold ||
      std::abs(theta) > options.separation_threshold) {
    throw Error(ErrorKind::SeparationDetected,
                "|coefficient| exceeded " + std::to_string(options.separation_threshold));
  }

  // Bread and meat, each block-structured by arm.
  double info[2] = {0.0, 0.0};
  double meat[2] = {0.0, 0.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    const int g = z[i] == 1.0 ? 1 : 0;
    const double r = y[i] - mu[g];
    meat[g] += w[i] * w[i] * r * r;
  }
  for (int g = 0; g < 2; ++g) info[g] = wsum[g] * mu[g] * (1.0 - mu[g]);
  const Eigen::Matrix2d a{{info[0] + info[1], info[1]}, {info[1], info[1]}};
  const Eigen::Matrix2d b{{meat[0] + meat[1], meat[1]}, {meat[1], meat[1]}};
  const Eigen::Matrix2d a_inv = a.inverse();
  const double var = (a_inv * b * a_inv)(1, 1);
  if (!(var > 0.0) || !std::isfinite(var)) {
    throw Error(ErrorKind::RankDeficient, "sandwich variance of the treatment coefficient is not positive");
  }
  return EffectEstimate{theta, std::sqrt(var), outcome};
}

}  // namespace empcal
