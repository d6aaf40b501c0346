#pragma once

// Quadrature grids and differentiation operators.
//
// RadialGrid: composite Gauss-Legendre panels in xi in (0,1) mapped to
// r = L xi / (1 - xi). Weights integrate f(r) r^{n-1} dr.
//
// SphereGrid: Gauss nodes in t = cos(theta) for zonal functions on S^n,
// weights integrate over the whole sphere.
//
// AngularRule: Gauss nodes in t = cos(theta) on S^{n-1} for axisymmetric
// fields on R^n, with the normalised zonal harmonics tabulated.

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "bubblelab/core.hpp"

namespace bubblelab {

struct GaussRule {
  std::vector<double> nodes;    // ascending, in (-1, 1)
  std::vector<double> weights;  // positive
};

/// Gauss-Jacobi rule for the weight (1-t)^alpha (1+t)^beta on [-1, 1]
/// (Golub-Welsch).
GaussRule gauss_jacobi(int count, double alpha, double beta);
inline GaussRule gauss_legendre(int count) { return gauss_jacobi(count, 0.0, 0.0); }

/// Barycentric weights for arbitrary distinct nodes.
Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& nodes);
/// Collocation differentiation matrix on the given nodes.
Eigen::MatrixXd differentiation_matrix(const Eigen::VectorXd& nodes);
/// Barycentric Lagrange interpolation of `values` at x.
double barycentric_interpolate(const Eigen::VectorXd& nodes, const Eigen::VectorXd& bary,
                               const Eigen::VectorXd& values, double x);

/// Zonal harmonics on S^{d-1} normalised by P_l(1) = 1, for l = 0..lmax.
/// d = n for axisymmetric fields on R^n, d = n + 1 for zonal fields on S^n.
void zonal_polynomials(int d, int lmax, double t, double* values, double* derivatives = nullptr);

struct GridSpec {
  double map_scale = 1.0;
  int panels = 32;
  int nodes_per_panel = 16;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

class RadialGrid {
 public:
  RadialGrid(const Dimension& dim, const GridSpec& spec);

  static std::shared_ptr<const RadialGrid> make(const Dimension& dim, const GridSpec& spec = {});

  const Dimension& dim() const { return dim_; }
  const GridSpec& spec() const { return spec_; }
  int size() const { return static_cast<int>(r_.size()); }
  int order() const { return spec_.nodes_per_panel; }

  const Eigen::VectorXd& xi() const { return xi_; }
  const Eigen::VectorXd& r() const { return r_; }
  /// Weights for \int_0^\infty f(r) r^{n-1} dr.
  const Eigen::VectorXd& weights() const { return w_; }
  /// d xi / d r at the nodes.
  const Eigen::VectorXd& dxi_dr() const { return dxi_dr_; }

  /// |S^{n-1}| \int_0^\infty f r^{n-1} dr: the integral of a radial function on R^n.
  double integral(const Eigen::VectorXd& f) const;
  /// df/dr by per-panel spectral collocation in xi.
  Eigen::VectorXd derivative(const Eigen::VectorXd& f) const;
  /// f'' + (n-1)/r f' - l(l+n-2)/r^2 f.
  Eigen::VectorXd mode_laplacian(const Eigen::VectorXd& f, int l) const;
  /// Panel-polynomial interpolation in xi at radius r >= 0.
  double interpolate(const Eigen::VectorXd& f, double r) const;
  /// Largest relative magnitude of the two highest Legendre coefficients over
  /// all panels; small values mean the samples are resolved.
  double resolution_tail(const Eigen::VectorXd& f) const;

  /// Reference Gauss nodes on [-1, 1] and the reference differentiation matrix.
  const Eigen::VectorXd& reference_nodes() const { return ref_nodes_; }
  const Eigen::VectorXd& reference_weights() const { return ref_weights_; }
  double panel_width() const { return 1.0 / spec_.panels; }

  GridSpec refined_spec() const;
  bool same_as(const RadialGrid& other) const {
    return this == &other || (dim_ == other.dim_ && spec_ == other.spec_);
  }

 private:
  Dimension dim_;
  GridSpec spec_;
  Eigen::VectorXd ref_nodes_, ref_weights_, ref_bary_;
  Eigen::MatrixXd ref_diff_;
  Eigen::VectorXd xi_, r_, w_, dxi_dr_;
};

class SphereGrid {
 public:
  SphereGrid(const Dimension& dim, int nodes);

  static std::shared_ptr<const SphereGrid> make(const Dimension& dim, int nodes = 32);

  const Dimension& dim() const { return dim_; }
  int size() const { return static_cast<int>(t_.size()); }
  /// t = cos(theta), ascending.
  const Eigen::VectorXd& t() const { return t_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  /// Weights for \int_{S^n} f, i.e. |S^{n-1}| \int_0^pi f sin^{n-1}(theta) dtheta.
  const Eigen::VectorXd& weights() const { return w_; }
  /// d/dt on the nodes.
  const Eigen::MatrixXd& diff() const { return d_; }
  /// Zonal Laplace-Beltrami (1-t^2) d_tt - n t d_t as a matrix.
  const Eigen::MatrixXd& laplacian() const { return lap_; }

  double integral(const Eigen::VectorXd& f) const { return w_.dot(f); }
  double interpolate(const Eigen::VectorXd& f, double t) const;
  /// Relative size of the two highest zonal-harmonic coefficients.
  double resolution_tail(const Eigen::VectorXd& f) const;

  bool same_as(const SphereGrid& other) const {
    return this == &other || (dim_ == other.dim_ && size() == other.size());
  }

 private:
  Dimension dim_;
  Eigen::VectorXd t_, theta_, w_, bary_;
  Eigen::MatrixXd d_, lap_;
};

/// Angular quadrature on S^{n-1} in t = cos(theta) with tabulated zonal
/// harmonics of degree <= lmax.
class AngularRule {
 public:
  AngularRule(const Dimension& dim, int lmax, int nodes);

  /// Rule used by default for fields of degree <= lmax.
  static std::shared_ptr<const AngularRule> for_degree(const Dimension& dim, int lmax);
  static int default_nodes(int lmax);

  int lmax() const { return lmax_; }
  int size() const { return static_cast<int>(t_.size()); }
  const Eigen::VectorXd& t() const { return t_; }
  /// Includes |S^{n-2}|; sums to |S^{n-1}|.
  const Eigen::VectorXd& weights() const { return w_; }
  /// P(j, l) = P_l(t_j), dP(j, l) = P_l'(t_j).
  const Eigen::MatrixXd& harmonics() const { return p_; }
  const Eigen::MatrixXd& harmonic_derivatives() const { return dp_; }
  /// N_l = \int_{S^{n-1}} P_l^2.
  const Eigen::VectorXd& norms() const { return norms_; }

 private:
  int lmax_;
  Eigen::VectorXd t_, w_, norms_;
  Eigen::MatrixXd p_, dp_;
};

}  // namespace bubblelab
