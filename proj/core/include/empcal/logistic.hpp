#pragma once

#include <optional>

#include <Eigen/Dense>

namespace empcal {

struct LogisticOptions {
  int max_iter = 25;
  /// Relative deviance change, |dev - dev_old| / (|dev| + 0.1).
  double tol = 1e-8;
  /// Any |coefficient| above this is reported as separation.
  double separation_threshold = 20.0;
};

struct LogisticFit {
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd model_covariance;  // inverse (weighted) information
  /// Sandwich A^-1 B A^-1, present when the fit was weighted.
  std::optional<Eigen::MatrixXd> robust_covariance;
  Eigen::VectorXd fitted;  // fitted probabilities
  bool converged = false;
  int iterations_used = 0;
  double deviance = 0.0;
};

/// Maximum-likelihood logistic regression by iteratively reweighted least
/// squares with step halving. `design` must carry its own intercept column;
/// `weights`, when given, must be strictly positive.
///
/// Throws Error with kind NonConvergence, SeparationDetected or
/// RankDeficient; InvalidArgument for non-conformable input.
LogisticFit fit_logistic(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                         const Eigen::VectorXd* weights = nullptr,
                         const LogisticOptions& options = {});

/// Weighted Bernoulli log-likelihood at `coefficients`.
double logistic_log_likelihood(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& coefficients,
                               const Eigen::VectorXd* weights = nullptr);

}  // namespace empcal
