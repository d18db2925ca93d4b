#include "empcal/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace empcal {

SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& objective,
                               const Eigen::VectorXd& start, const Eigen::VectorXd& step,
                               const SimplexOptions& options) {
  const Eigen::Index dim = start.size();
  const auto npts = static_cast<std::size_t>(dim + 1);
  int evals = 0;
  const auto f = [&](const Eigen::VectorXd& x) {
    ++evals;
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Eigen::VectorXd> pts(npts, start);
  std::vector<double> vals(npts);
  for (Eigen::Index j = 0; j < dim; ++j) pts[static_cast<std::size_t>(j + 1)][j] += step[j];
  for (std::size_t i = 0; i < npts; ++i) vals[i] = f(pts[i]);

  std::vector<std::size_t> order(npts);
  SimplexResult result;
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[npts - 2];

    double xspread = 0.0;
    for (std::size_t i = 0; i < npts; ++i) {
      xspread = std::max(xspread, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
    }
    const double fspread = vals[worst] - vals[best];
    if (std::isfinite(vals[best]) && fspread <= options.ftol && xspread <= options.xtol) {
      result.converged = true;
      break;
    }
    if (evals >= options.max_evaluations) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < npts; ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= static_cast<double>(dim);

    const Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
    const double f_reflected = f(reflected);
    if (f_reflected < vals[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        pts[worst] = expanded;
        vals[worst] = f_expanded;
      } else {
        pts[worst] = reflected;
        vals[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < vals[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
    const double f_contracted = f(contracted);
    if (f_contracted < (outside ? f_reflected : vals[worst])) {
      pts[worst] = contracted;
      vals[worst] = f_contracted;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i < npts; ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      vals[i] = f(pts[i]);
    }
  }

  const auto best_it = std::min_element(vals.begin(), vals.end());
  const auto best = static_cast<std::size_t>(best_it - vals.begin());
  result.x = pts[best];
  result.value = vals[best];
  result.evaluations = evals;
  return result;
}

}  // namespace empcal
