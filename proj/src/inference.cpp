#include "nvsim/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nvsim/errors.hpp"

namespace nvsim {

bool FitResult::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& fn,
                                           const Eigen::VectorXd& params,
                                           double rel_step, double abs_floor) {
  const Eigen::VectorXd r0 = fn(params);
  const auto m = r0.size();
  const auto n = params.size();
  Eigen::MatrixXd j(m, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double h = std::max(rel_step * std::abs(params[k]), abs_floor);
    Eigen::VectorXd p = params;
    p[k] = params[k] + h;
    const Eigen::VectorXd rp = fn(p);
    p[k] = params[k] - h;
    const Eigen::VectorXd rm = fn(p);
    if (rp.size() != m || rm.size() != m)
      throw NumericalError("finite_difference_jacobian: residual size changed");
    j.col(k) = (rp - rm) / (2.0 * h);
  }
  return j;
}

namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi) {
  Eigen::VectorXd out = x;
  if (lo.size() == x.size())
    for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = std::max(out[i], lo[i]);
  if (hi.size() == x.size())
    for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = std::min(out[i], hi[i]);
  return out;
}

}  // namespace

FitResult fit_least_squares(const FitProblem& problem,
                            const FitOptions& options) {
  const auto& fn = problem.residuals;
  const Eigen::Index n = problem.initial.size();
  if (n == 0) throw std::invalid_argument("fit: empty parameter vector");

  Eigen::VectorXd x = clamp(problem.initial, problem.lower, problem.upper);
  Eigen::VectorXd r = fn(x);
  if (r.size() < n)
    throw std::invalid_argument("fit: fewer residuals than parameters");
  double obj = 0.5 * r.squaredNorm();
  double lambda = options.initial_damping;

  FitResult result;
  result.converged = false;
  int it = 0;
  for (it = 0; it < options.max_iterations; ++it) {
    const Eigen::MatrixXd j =
        finite_difference_jacobian(fn, x, options.fd_rel_step);
    const Eigen::VectorXd g = j.transpose() * r;
    const Eigen::MatrixXd h = j.transpose() * j;

    bool accepted = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Eigen::MatrixXd a = h;
      for (Eigen::Index i = 0; i < n; ++i)
        a(i, i) += lambda * std::max(h(i, i), 1e-12);
      const Eigen::VectorXd step = a.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::VectorXd xt = clamp(x + step, problem.lower, problem.upper);
      const Eigen::VectorXd rt = fn(xt);
      const double objt = 0.5 * rt.squaredNorm();
      if (objt < obj) {
        const double rel_drop = (obj - objt) / std::max(obj, 1e-300);
        const double step_norm = (xt - x).norm();
        x = xt;
        r = rt;
        obj = objt;
        lambda = std::max(lambda * 0.5, 1e-14);
        accepted = true;
        if (rel_drop < options.objective_tol ||
            step_norm < options.step_tol) {
          result.converged = true;
        }
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
    if (!accepted) {
      // no descent direction left at this damping scale: local optimum
      result.converged = true;
      break;
    }
    if (result.converged) break;
  }

  result.parameters = x;
  result.iterations = it + 1;
  result.residual_norm = std::sqrt(2.0 * obj);
  if (!result.converged) result.flags.push_back("max_iterations");

  // standard errors from the Jacobian at the optimum
  const Eigen::MatrixXd j = finite_difference_jacobian(fn, x, options.fd_rel_step);
  const Eigen::MatrixXd h = j.transpose() * j;
  const Eigen::Index m = r.size();
  const double dof = static_cast<double>(m > n ? m - n : 1);
  const double s2 = 2.0 * obj / dof;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smax = svd.singularValues()(0);
  if (smax <= 0.0 || svd.singularValues()(n - 1) < 1e-12 * smax) {
    result.flags.push_back("rank_deficient");
  }
  Eigen::VectorXd inv_s = svd.singularValues();
  for (Eigen::Index i = 0; i < n; ++i)
    inv_s[i] = inv_s[i] > 1e-14 * smax ? 1.0 / inv_s[i] : 0.0;
  result.covariance =
      svd.matrixV() * inv_s.asDiagonal() * svd.matrixU().transpose() * s2;
  result.std_errors = result.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();

  for (Eigen::Index i = 0; i < n; ++i) {
    const bool at_lo = problem.lower.size() == n && x[i] <= problem.lower[i];
    const bool at_hi = problem.upper.size() == n && x[i] >= problem.upper[i];
    if (at_lo || at_hi) {
      result.flags.push_back("at_bound:" + std::to_string(i));
    }
  }
  return result;
}

}  // namespace nvsim
