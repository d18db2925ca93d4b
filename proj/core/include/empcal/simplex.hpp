#pragma once

#include <functional>

#include <Eigen/Dense>

namespace empcal {

struct SimplexOptions {
  double ftol = 1e-8;  // spread of objective values across the simplex
  double xtol = 1e-8;  // max vertex distance from the best vertex
  int max_evaluations = 20'000;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead minimization. Non-finite objective values are treated as +inf.
SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& objective,
                               const Eigen::VectorXd& start, const Eigen::VectorXd& step,
                               const SimplexOptions& options = {});

}  // namespace empcal
