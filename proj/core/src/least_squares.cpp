#include "bubblelab/least_squares.hpp"

#include <cmath>

#include "bubblelab/core.hpp"

namespace bubblelab {

LeastSquaresResult levenberg_marquardt(const ModelFunction& model, const Eigen::VectorXd& x0,
                                       const LeastSquaresOptions& opts) {
  LeastSquaresResult res;
  res.x = x0;
  GaussNewtonModel m = model(x0);
  if (!m.valid) {
    res.status = "initial point not admissible";
    return res;
  }
  double mu = opts.initial_damping;
  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it;
    res.cost = m.cost;
    res.gradient_norm = m.gradient.cwiseAbs().maxCoeff();
    if (res.gradient_norm <= opts.gradient_tol) {
      res.converged = true;
      res.status = "gradient tolerance reached";
      return res;
    }
    bool accepted = false;
    for (int tries = 0; tries < 40 && !accepted; ++tries) {
      Eigen::MatrixXd a = m.normal;
      a.diagonal() += mu * m.normal.diagonal().cwiseMax(1e-300);
      const Eigen::VectorXd step = a.ldlt().solve(-m.gradient);
      if (!step.allFinite()) {
        mu *= 10.0;
        continue;
      }
      const Eigen::VectorXd xn = res.x + step;
      GaussNewtonModel mn = model(xn);
      const double noise = std::max(m.cost_noise, 1e-15 * std::abs(m.cost));
      const bool descent =
          mn.valid && (mn.cost < m.cost - noise ||
                       (mn.cost <= m.cost + noise &&
                        mn.gradient.cwiseAbs().maxCoeff() < m.gradient.cwiseAbs().maxCoeff()));
      if (descent) {
        const double rel = step.norm() / (1.0 + res.x.norm());
        res.x = xn;
        m = std::move(mn);
        mu = std::max(mu / 10.0, 1e-12);
        accepted = true;
        if (rel <= opts.step_tol) {
          res.iterations = it + 1;
          res.cost = m.cost;
          res.gradient_norm = m.gradient.cwiseAbs().maxCoeff();
          res.converged = res.gradient_norm <= opts.gradient_tol;
          res.status = "step tolerance reached";
          return res;
        }
      } else {
        mu *= 10.0;
      }
    }
    if (!accepted) {
      res.cost = m.cost;
      res.gradient_norm = m.gradient.cwiseAbs().maxCoeff();
      res.converged = res.gradient_norm <= opts.gradient_tol;
      res.status = "no descent step found";
      return res;
    }
  }
  res.iterations = opts.max_iterations;
  res.cost = m.cost;
  res.gradient_norm = m.gradient.cwiseAbs().maxCoeff();
  res.converged = res.gradient_norm <= opts.gradient_tol;
  res.status = "iteration limit";
  return res;
}

LeastSquaresResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& x0,
                                       const LeastSquaresOptions& opts) {
  auto model = [&f](const Eigen::VectorXd& x) {
    Eigen::VectorXd r;
    Eigen::MatrixXd j;
    f(x, r, &j);
    GaussNewtonModel m;
    m.valid = r.allFinite() && j.allFinite();
    m.cost = 0.5 * r.squaredNorm();
    m.gradient = j.transpose() * r;
    m.normal = j.transpose() * j;
    return m;
  };
  return levenberg_marquardt(ModelFunction(model), x0, opts);
}

}  // namespace bubblelab
