#pragma once

#include <Eigen/Dense>

#include <functional>

namespace catbell {

struct SimplexOptions {
  double initial_scale = 0.5;
  /// Stop when the spread of objective values over the simplex drops below this.
  double f_tolerance = 1e-12;
  /// ...and the simplex diameter drops below this.
  double x_tolerance = 1e-9;
  int max_evaluations = 4000;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Box-constrained Nelder-Mead minimization; trial points are projected onto [lower, upper].
SimplexResult nelder_mead_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& start, const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper, const SimplexOptions& options);

/// Point `index` of the Halton sequence in [0,1)^dim (dim <= 8), skipping the origin.
Eigen::VectorXd halton_point(int index, int dim);

}  // namespace catbell
