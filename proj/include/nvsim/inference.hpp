#pragma once

#include <functional>
#include <string>
#include <vector>
#include <Eigen/Dense>

namespace nvsim {

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Central differences with per-parameter relative step (absolute floor near
// zero). Used inside the optimizer and as an independent check in tests.
Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& fn,
                                           const Eigen::VectorXd& params,
                                           double rel_step = 1e-6,
                                           double abs_floor = 1e-9);

struct FitOptions {
  int max_iterations = 500;
  double objective_tol = 1e-10;  // relative objective change
  double step_tol = 1e-12;       // step norm
  double initial_damping = 1e-3;
  double fd_rel_step = 1e-6;
};

struct FitProblem {
  ResidualFn residuals;
  Eigen::VectorXd initial;
  Eigen::VectorXd lower;  // empty = unbounded
  Eigen::VectorXd upper;
};

struct FitResult {
  Eigen::VectorXd parameters;
  Eigen::VectorXd std_errors;
  Eigen::MatrixXd covariance;
  double residual_norm = 0.0;  // sqrt(sum r^2) at the solution
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> flags;

  bool has_flag(const std::string& f) const;
};

// Damped least squares: a trial step solving (J'J + lambda diag(J'J)) d = -J'r
// is accepted only if the objective decreases; damping is multiplied by 10 on
// rejection and halved on acceptance. Stops on relative objective change
// below objective_tol, step norm below step_tol, or max_iterations.
// Parameters are clamped to the bounds; a parameter ending on a bound is
// flagged "at_bound". Standard errors come from the Jacobian at the optimum,
// scaled by the reduced chi-square.
FitResult fit_least_squares(const FitProblem& problem,
                            const FitOptions& options = {});

}  // namespace nvsim
