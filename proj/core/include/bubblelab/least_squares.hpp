#pragma once

// Levenberg-Marquardt on a Gauss-Newton model.
//
// The caller supplies, at each parameter vector x, the cost 0.5 |r(x)|^2,
// the gradient J^T r and the normal matrix J^T J. This form lets residuals
// live in a function space (Dirichlet inner product) rather than R^m.

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace bubblelab {

struct GaussNewtonModel {
  double cost = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd normal;
  double cost_noise = 0.0;  // rounding level of `cost`; within it, steps must reduce |gradient|
  bool valid = true;        // false: x is outside the admissible region
};

using ModelFunction = std::function<GaussNewtonModel(const Eigen::VectorXd&)>;

struct LeastSquaresOptions {
  int max_iterations = 200;
  double gradient_tol = 1e-12;  // absolute, on |J^T r|_inf
  double step_tol = 1e-15;      // relative step size
  double initial_damping = 1e-3;
};

struct LeastSquaresResult {
  Eigen::VectorXd x;
  double cost = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string status;
};

LeastSquaresResult levenberg_marquardt(const ModelFunction& model, const Eigen::VectorXd& x0,
                                       const LeastSquaresOptions& opts = {});

/// Residual-vector form: f(x, r, J) fills r and, if J is non-null, the Jacobian.
using ResidualFunction = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd*)>;
LeastSquaresResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& x0,
                                       const LeastSquaresOptions& opts = {});

}  // namespace bubblelab
