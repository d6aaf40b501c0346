#include "bubblelab/conformal.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bubblelab/bubble.hpp"

namespace bubblelab {

std::vector<double> StereographicMap::operator()(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != dim_.n()) throw InvalidArgument("StereographicMap: point must have n coordinates");
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  std::vector<double> y(x.size() + 1);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 2.0 * x[i] / (1.0 + r2);
  y.back() = (r2 - 1.0) / (r2 + 1.0);
  return y;
}

double StereographicMap::sphere_coordinate(double r) {
  if (std::isinf(r)) return 1.0;
  return (r * r - 1.0) / (r * r + 1.0);
}

double StereographicMap::plane_radius(double t) {
  if (t >= 1.0) return std::numeric_limits<double>::infinity();
  return std::sqrt((1.0 + t) / (1.0 - t));
}

double StereographicMap::conformal_factor(double r) const {
  return std::pow(2.0 / (1.0 + r * r), 0.5 * (dim_.n() - 2));
}

ZonalSphereField plane_to_sphere(const ModalField& u, std::shared_ptr<const SphereGrid> sphere, double tol) {
  if (!sphere) throw InvalidArgument("plane_to_sphere: null sphere grid");
  if (!(u.dim() == sphere->dim())) throw GridMismatch("plane_to_sphere: dimensions differ");
  const double base = u.profiles().col(0).cwiseAbs().maxCoeff();
  for (int l = 1; l <= u.lmax(); ++l) {
    if (u.profiles().col(l).cwiseAbs().maxCoeff() > 1e-12 * std::max(base, 1e-300))
      throw InvalidArgument("plane_to_sphere: only radial fields map to zonal fields");
  }
  const Eigen::VectorXd f = u.profiles().col(0);
  const double a = 0.5 * (u.dim().n() - 2);
  Eigen::VectorXd v(sphere->size());
  for (int j = 0; j < sphere->size(); ++j) {
    const double t = sphere->t()(j);
    const double r = StereographicMap::plane_radius(t);
    // (2/(1+r^2))^{-a} = (1-t)^{-a}
    v(j) = u.grid().interpolate(f, r) * std::pow(1.0 - t, -a);
  }
  ZonalSphereField out(std::move(sphere), std::move(v));
  const double tail = out.grid().resolution_tail(out.samples());
  if (tail > tol) {
    throw Unresolved("plane_to_sphere: sphere grid does not resolve the field (tail " + std::to_string(tail) + ")");
  }
  return out;
}

ModalField sphere_to_plane(const ZonalSphereField& v, std::shared_ptr<const RadialGrid> grid, double tol) {
  if (!grid) throw InvalidArgument("sphere_to_plane: null radial grid");
  if (!(v.dim() == grid->dim())) throw GridMismatch("sphere_to_plane: dimensions differ");
  const double tail = v.grid().resolution_tail(v.samples());
  if (tail > tol) {
    throw Unresolved("sphere_to_plane: sphere field is under-resolved (tail " + std::to_string(tail) + ")");
  }
  const StereographicMap map(v.dim());
  Eigen::VectorXd f(grid->size());
  for (int i = 0; i < grid->size(); ++i) {
    const double r = grid->r()(i);
    f(i) = map.conformal_factor(r) * v.value(StereographicMap::sphere_coordinate(r));
  }
  return ModalField::radial(std::move(grid), std::move(f));
}

double sphere_bubble(const Dimension& dim, double kappa, double lambda, double t) {
  const double a = 0.5 * (dim.n() - 2);
  return bubble_constant(dim, kappa) * std::pow((1.0 - t) / lambda + lambda * (1.0 + t), -a);
}

double sphere_bubble_dlambda(const Dimension& dim, double kappa, double lambda, double t) {
  const double a = 0.5 * (dim.n() - 2);
  const double q = (1.0 - t) / lambda + lambda * (1.0 + t);
  const double dq = -(1.0 - t) / (lambda * lambda) + (1.0 + t);
  return -a * bubble_constant(dim, kappa) * std::pow(q, -a - 1.0) * dq;
}

ZonalSphereField sphere_bubble_field(std::shared_ptr<const SphereGrid> sphere, double kappa, double lambda,
                                     double amplitude) {
  const Dimension dim = sphere->dim();
  return ZonalSphereField::sample(std::move(sphere), [&](double t) {
    return amplitude * sphere_bubble(dim, kappa, lambda, t);
  });
}

double stationary_constant(const Dimension& dim) {
  const double n = dim.n();
  return std::pow(n * (n - 2.0) / (n + 2.0), (n - 2.0) / 4.0);
}

}  // namespace bubblelab
