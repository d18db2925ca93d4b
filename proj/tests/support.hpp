#pragma once

#include <Eigen/Dense>

#include "empcal/config.hpp"

namespace empcal::test {

// Cohort with the given counts of (z, y) pairs: (1,1), (1,0), (0,1), (0,0).
struct TwoByTwo {
  Eigen::VectorXd z;
  Eigen::VectorXd y;
};

inline TwoByTwo two_by_two(int z1y1, int z1y0, int z0y1, int z0y0) {
  const int n = z1y1 + z1y0 + z0y1 + z0y0;
  TwoByTwo t{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  int i = 0;
  const auto fill = [&](int count, double z, double y) {
    for (int k = 0; k < count; ++k, ++i) {
      t.z[i] = z;
      t.y[i] = y;
    }
  };
  fill(z1y1, 1, 1);
  fill(z1y0, 1, 0);
  fill(z0y1, 0, 1);
  fill(z0y0, 0, 0);
  return t;
}

inline ScenarioConfig small_config(Scenario scenario, Suitability suitability, int n = 4000, int iterations = 10) {
  ScenarioConfig c;
  c.scenario = scenario;
  c.suitability = suitability;
  c.n_subjects = n;
  c.n_iterations = iterations;
  return c;
}

}  // namespace empcal::test
