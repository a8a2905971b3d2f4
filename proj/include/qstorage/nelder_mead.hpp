#pragma once

#include <Eigen/Dense>

#include <functional>

namespace qstorage {

struct NelderMeadOptions {
  int max_iterations = 5000;
  /// Converged when (f_worst - f_best) <= rel_tol * |f_best| ...
  double rel_tol = 1e-10;
  /// ... or every vertex is within step_tol (max-norm) of the best one.
  double step_tol = 1e-9;
  double initial_step = 0.05;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Derivative-free simplex minimization with dimension-adaptive coefficients
/// (Gao & Han). On convergence the simplex is rebuilt around the best vertex;
/// the search stops once a rebuilt simplex no longer improves by more than
/// rel_tol. The iteration budget covers all rebuilds.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& start, const NelderMeadOptions& options = {});

}  // namespace qstorage
