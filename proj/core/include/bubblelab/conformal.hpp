#pragma once

// Stereographic dictionary between radial fields on R^n and zonal fields on
// S^n. With t = cos(theta) = (r^2 - 1)/(r^2 + 1), the origin sits at theta = pi
// and infinity at theta = 0, and
//   u(x) = (2 / (1 + |x|^2))^{(n-2)/2} v(F(x)).

#include <memory>
#include <vector>

#include "bubblelab/field.hpp"

namespace bubblelab {

class StereographicMap {
 public:
  explicit StereographicMap(const Dimension& dim) : dim_(dim) {}

  const Dimension& dim() const { return dim_; }
  /// F(x) = (2x/(1+|x|^2), (|x|^2-1)/(1+|x|^2)) in R^{n+1}.
  std::vector<double> operator()(const std::vector<double>& x) const;

  static double sphere_coordinate(double r);  // t(r)
  static double plane_radius(double t);       // r(t), infinite at t = 1
  /// (2/(1+r^2))^{(n-2)/2}.
  double conformal_factor(double r) const;

 private:
  Dimension dim_;
};

/// v(t) = (2/(1+r^2))^{-(n-2)/2} u(r) at the sphere nodes. u must be radial.
ZonalSphereField plane_to_sphere(const ModalField& u, std::shared_ptr<const SphereGrid> sphere,
                                 double tol = 1e-8);
/// u(r) = (2/(1+r^2))^{(n-2)/2} v(t(r)) at the radial nodes.
ModalField sphere_to_plane(const ZonalSphereField& v, std::shared_ptr<const RadialGrid> grid,
                           double tol = 1e-8);

/// Sphere image of v_kappa[0, lambda]: c_kappa (lambda^{-1}(1-t) + lambda(1+t))^{-(n-2)/2}.
double sphere_bubble(const Dimension& dim, double kappa, double lambda, double t);
/// d/dlambda of sphere_bubble.
double sphere_bubble_dlambda(const Dimension& dim, double kappa, double lambda, double t);
ZonalSphereField sphere_bubble_field(std::shared_ptr<const SphereGrid> sphere, double kappa, double lambda,
                                     double amplitude = 1.0);
/// The constant stationary state (n(n-2)/(n+2))^{(n-2)/4}.
double stationary_constant(const Dimension& dim);

}  // namespace bubblelab
