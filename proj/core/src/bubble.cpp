#include "bubblelab/bubble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bubblelab {

double bubble_constant(const Dimension& dim, double kappa) {
  if (!(kappa > 0.0)) throw InvalidArgument("bubble_constant: kappa must be positive");
  const double n = dim.n();
  return std::pow(n * (n - 2.0) / kappa, (n - 2.0) / 4.0);
}

double sobolev_power(const Dimension& dim) {
  const double n = dim.n();
  return std::pow(std::numbers::pi * n * (n - 2.0), n / 2.0) * std::tgamma(n / 2.0) / std::tgamma(n);
}

double eval_bubble(const Dimension& dim, const BubbleParams& params, const std::vector<double>& x) {
  params.validate(dim);
  if (static_cast<int>(x.size()) != dim.n()) throw InvalidArgument("eval_bubble: point must have n coordinates");
  double rho2 = 0.0;
  for (int i = 0; i < dim.n(); ++i) {
    const double z = params.center.empty() ? 0.0 : params.center[i];
    rho2 += (x[i] - z) * (x[i] - z);
  }
  const double a = 0.5 * (dim.n() - 2);
  const double lam = params.scale;
  return params.amplitude * std::pow(lam, a) * bubble_constant(dim, params.kappa) *
         std::pow(1.0 + lam * lam * rho2, -a);
}

namespace {
inline double axial_rho2(double z, double r, double t) { return std::max(0.0, r * r - 2.0 * r * t * z + z * z); }
}  // namespace

double bubble_value(const Dimension& dim, double kappa, double z, double lambda, double alpha,
                    double r, double t) {
  const double a = 0.5 * (dim.n() - 2);
  const double q = 1.0 + lambda * lambda * axial_rho2(z, r, t);
  return alpha * std::pow(lambda, a) * bubble_constant(dim, kappa) * std::pow(q, -a);
}

double bubble_dlambda(const Dimension& dim, double kappa, double z, double lambda, double r, double t) {
  const double n = dim.n();
  const double s = lambda * lambda * axial_rho2(z, r, t);
  return 0.5 * (n - 2.0) * bubble_constant(dim, kappa) * std::pow(lambda, 0.5 * (n - 4.0)) * (1.0 - s) *
         std::pow(1.0 + s, -0.5 * n);
}

double bubble_dz(const Dimension& dim, double kappa, double z, double lambda, double r, double t) {
  const double n = dim.n();
  const double s = lambda * lambda * axial_rho2(z, r, t);
  return (n - 2.0) * bubble_constant(dim, kappa) * std::pow(lambda, 0.5 * (n + 2.0)) * (r * t - z) *
         std::pow(1.0 + s, -0.5 * n);
}

double axial_coordinate(const BubbleParams& params, const std::vector<double>& axis) {
  if (params.center.empty()) return 0.0;
  if (params.center.size() != axis.size()) throw InvalidArgument("bubble centre has the wrong length");
  double a = 0.0;
  for (std::size_t i = 0; i < axis.size(); ++i) a += params.center[i] * axis[i];
  double off2 = 0.0;
  for (std::size_t i = 0; i < axis.size(); ++i) {
    const double e = params.center[i] - a * axis[i];
    off2 += e * e;
  }
  if (std::sqrt(off2) > 1e-12 * (1.0 + std::abs(a)))
    throw InvalidArgument("bubble centre must lie on the symmetry axis for a ModalField");
  return a;
}

ModalField eval_bubble(std::shared_ptr<const RadialGrid> grid, const BubbleParams& params, double tol,
                       std::vector<double> axis) {
  if (!grid) throw InvalidArgument("eval_bubble: null grid");
  const Dimension& dim = grid->dim();
  params.validate(dim);
  axis = normalize_axis(dim, std::move(axis));
  const double z = axial_coordinate(params, axis);
  const double kap = params.kappa, lam = params.scale, alpha = params.amplitude;
  if (z == 0.0) {
    Eigen::VectorXd f(grid->size());
    for (int i = 0; i < grid->size(); ++i) f(i) = bubble_value(dim, kap, 0.0, lam, alpha, grid->r()(i), 1.0);
    return ModalField::radial(std::move(grid), std::move(f), std::move(axis));
  }
  return ModalField::sample_adaptive(
      std::move(grid), [&](int, double r, double t) { return bubble_value(dim, kap, z, lam, alpha, r, t); },
      tol, 8, 2048, std::move(axis));
}

BubbleBasis bubble_basis(std::shared_ptr<const RadialGrid> grid, const BubbleParams& params, double tol,
                         std::vector<double> axis) {
  if (!grid) throw InvalidArgument("bubble_basis: null grid");
  const Dimension& dim = grid->dim();
  params.validate(dim);
  axis = normalize_axis(dim, std::move(axis));
  BubbleParams unit = params;
  unit.amplitude = 1.0;
  const double z = axial_coordinate(params, axis);
  const double kap = params.kappa, lam = params.scale;
  ModalField u = eval_bubble(grid, unit, tol, axis);
  auto dl = [&](int, double r, double t) { return bubble_dlambda(dim, kap, z, lam, r, t); };
  auto dz = [&](int, double r, double t) { return bubble_dz(dim, kap, z, lam, r, t); };
  if (z == 0.0) {
    ModalField v = ModalField::sample_nodes(grid, 0, dl, axis);
    ModalField w = ModalField::sample_nodes(grid, 1, dz, axis);
    // the sampled degree-0 part of W is rounding noise
    Eigen::MatrixXd wp = w.profiles();
    wp.col(0).setZero();
    return {unit, std::move(u), std::move(v), ModalField(grid, std::move(wp), axis)};
  }
  ModalField v = ModalField::sample_adaptive(grid, dl, tol, 8, 2048, axis);
  ModalField w = ModalField::sample_adaptive(grid, dz, tol, 8, 2048, axis);
  return {unit, std::move(u), std::move(v), std::move(w)};
}

BubbleIdentities bubble_identities(const Dimension& dim, double kappa, const RadialGrid& grid, double tol) {
  if (!(dim == grid.dim())) throw GridMismatch("bubble_identities: grid dimension differs");
  Eigen::VectorXd v(grid.size());
  for (int i = 0; i < grid.size(); ++i) v(i) = bubble_value(dim, kappa, 0.0, 1.0, 1.0, grid.r()(i), 1.0);
  const Eigen::VectorXd dv = grid.derivative(v);
  BubbleIdentities out;
  out.kappa = kappa;
  out.dirichlet = grid.integral(dv.array().square().matrix());
  out.mass = grid.integral(v.array().pow(dim.two_star()).matrix());
  const double n = dim.n();
  const double sn_energy = std::pow(kappa, 0.5 * (n - 2.0)) * out.dirichlet;
  const double sn_mass = std::pow(kappa, 0.5 * n) * out.mass;
  out.s_est = std::pow(sn_energy, 1.0 / n);
  out.ratio = out.dirichlet / out.mass;
  out.disagreement = std::abs(sn_energy - sn_mass) / sn_mass;
  out.resolved = out.disagreement <= tol;
  return out;
}

double bubble_residual(const Dimension& dim, double kappa, const RadialGrid& grid) {
  Eigen::VectorXd v(grid.size());
  for (int i = 0; i < grid.size(); ++i) v(i) = bubble_value(dim, kappa, 0.0, 1.0, 1.0, grid.r()(i), 1.0);
  const Eigen::VectorXd res = grid.mode_laplacian(v, 0) + kappa * v.array().pow(dim.p()).matrix();
  return std::sqrt(grid.integral(res.array().square().matrix()));
}

ModalField cap_profile(std::shared_ptr<const RadialGrid> grid) {
  if (!grid) throw InvalidArgument("cap_profile: null grid");
  Eigen::VectorXd f(grid->size());
  for (int i = 0; i < grid->size(); ++i) {
    const double r = grid->r()(i);
    f(i) = r < 1.0 ? std::pow(1.0 - r * r, 3) : 0.0;
  }
  return ModalField::radial(std::move(grid), std::move(f));
}

PerturbedBubble make_perturbed_bubble(const ModalField& phi, double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidArgument("make_perturbed_bubble: eps must be >= 0");
  const auto& grid = phi.grid_ptr();
  const Dimension& dim = phi.dim();
  const double p = dim.p();
  const int nr = grid->size();
  Eigen::VectorXd v(nr);
  for (int i = 0; i < nr; ++i) v(i) = bubble_value(dim, 1.0, 0.0, 1.0, 1.0, grid->r()(i), 1.0);
  ModalField u = ModalField::radial(grid, v, phi.axis()) + eps * phi;

  Eigen::MatrixXd lap(nr, phi.lmax() + 1);
  for (int l = 0; l <= phi.lmax(); ++l) lap.col(l) = grid->mode_laplacian(phi.profiles().col(l), l);

  if (phi.effective_lmax() == 0) {
    const Eigen::VectorXd uu = u.profiles().col(0);
    if (!(uu.minCoeff() > 0.0)) throw NonPositiveField("make_perturbed_bubble: u_eps must be positive");
    Eigen::VectorXd k(nr);
    for (int i = 0; i < nr; ++i) k(i) = (std::pow(v(i), p) - eps * lap(i, 0)) / std::pow(uu(i), p);
    return {u.with_lmax(0), ModalField::radial(grid, std::move(k), phi.axis())};
  }

  const ModalField lap_field(grid, std::move(lap), phi.axis());
  ModalField k = ModalField::sample_adaptive(
      grid,
      [&](int i, double, double t) {
        const double ui = u.value_at_node(i, t);
        if (!(ui > 0.0)) throw NonPositiveField("make_perturbed_bubble: u_eps must be positive");
        return (std::pow(v(i), p) - eps * lap_field.value_at_node(i, t)) / std::pow(ui, p);
      },
      1e-12, std::max(8, 4 * phi.lmax()), 2048, phi.axis());
  return {std::move(u), std::move(k)};
}

MultiBubble make_multibubble(std::shared_ptr<const RadialGrid> grid, const std::vector<BubbleParams>& params,
                             double tol, std::vector<double> axis) {
  if (!grid) throw InvalidArgument("make_multibubble: null grid");
  if (params.empty()) throw InvalidArgument("make_multibubble: need at least one bubble");
  const Dimension& dim = grid->dim();
  axis = normalize_axis(dim, std::move(axis));
  std::vector<double> z, lam, kap;
  for (const auto& b : params) {
    b.validate(dim);
    z.push_back(axial_coordinate(b, axis));
    lam.push_back(b.scale);
    kap.push_back(b.kappa);
  }
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t j = i + 1; j < z.size(); ++j) {
      if (std::abs(z[i] - z[j]) < 1e-12 * (1.0 + std::abs(z[i])))
        throw InvalidArgument("make_multibubble: overlapping centres");
    }
  }
  const double p = dim.p();
  auto sum = [&](double r, double t, double& s, double& sp) {
    s = sp = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
      const double vk = bubble_value(dim, kap[k], z[k], lam[k], 1.0, r, t);
      s += vk;
      sp += std::pow(vk, p);
    }
  };
  ModalField u = ModalField::sample_adaptive(
      grid,
      [&](int, double r, double t) {
        double s, sp;
        sum(r, t, s, sp);
        return s;
      },
      tol, 16, 2048, axis);
  if (params.size() == 1) {
    return {std::move(u), ModalField::radial(grid, Eigen::VectorXd::Ones(grid->size()), axis)};
  }
  ModalField k = ModalField::sample_nodes(
      grid, u.lmax(),
      [&](int, double r, double t) {
        double s, sp;
        sum(r, t, s, sp);
        return sp / std::pow(s, p);
      },
      axis);
  return {std::move(u), std::move(k)};
}

std::vector<BubbleParams> two_bubble_params(const Dimension& dim, double separation) {
  if (!(separation > 0.0)) throw InvalidArgument("two_bubble_params: separation must be positive");
  return {BubbleParams::on_axis(dim, -0.5 * separation), BubbleParams::on_axis(dim, 0.5 * separation)};
}

GridSpec multibubble_grid_spec(const std::vector<BubbleParams>& params) {
  double reach = 1.0;
  for (const auto& b : params) {
    double c2 = 0.0;
    for (double c : b.center) c2 += c * c;
    reach = std::max(reach, std::sqrt(c2));
  }
  return GridSpec{reach, 64, 16};
}

}  // namespace bubblelab
