#pragma once

// Field representations.
//
// ModalField: axisymmetric u(x) = sum_l f_l(|x|) P_l(cos angle(x, axis)) on R^n,
// with P_l the zonal harmonic of degree l normalised to P_l(1) = 1.
// ZonalSphereField: zonal v on S^n sampled at SphereGrid nodes.

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "bubblelab/grid.hpp"

namespace bubblelab {

/// Values and first derivatives of a ModalField on the (r, t) tensor grid.
struct TensorSamples {
  Eigen::MatrixXd u;    // (radial nodes) x (angular nodes)
  Eigen::MatrixXd u_r;  // du/dr
  Eigen::MatrixXd u_t;  // du/dt at fixed r
};

class ModalField {
 public:
  /// `profiles` is (grid size) x (lmax + 1); column l holds f_l. Empty axis
  /// means the last coordinate axis.
  ModalField(std::shared_ptr<const RadialGrid> grid, Eigen::MatrixXd profiles,
             std::vector<double> axis = {});

  static ModalField zero(std::shared_ptr<const RadialGrid> grid, int lmax = 0,
                         std::vector<double> axis = {});
  static ModalField radial(std::shared_ptr<const RadialGrid> grid, Eigen::VectorXd profile,
                           std::vector<double> axis = {});
  /// Projects f(r, t) onto degrees 0..lmax with an exact angular rule.
  static ModalField sample(std::shared_ptr<const RadialGrid> grid, int lmax,
                           const std::function<double(double r, double t)>& f,
                           std::vector<double> axis = {}, int angular_nodes = 0);
  /// Node-indexed variant: f(i, r_i, t).
  static ModalField sample_nodes(std::shared_ptr<const RadialGrid> grid, int lmax,
                                 const std::function<double(int i, double r, double t)>& f,
                                 std::vector<double> axis = {}, int angular_nodes = 0);
  /// Doubles lmax from `start` until the two top degrees fall below
  /// tol * max|u|; throws Unresolved past `cap`.
  static ModalField sample_adaptive(std::shared_ptr<const RadialGrid> grid,
                                    const std::function<double(int i, double r, double t)>& f,
                                    double tol = 1e-10, int start = 8, int cap = 2048,
                                    std::vector<double> axis = {});

  const Dimension& dim() const { return grid_->dim(); }
  const RadialGrid& grid() const { return *grid_; }
  const std::shared_ptr<const RadialGrid>& grid_ptr() const { return grid_; }
  const std::vector<double>& axis() const { return axis_; }
  int lmax() const { return static_cast<int>(profiles_.cols()) - 1; }
  const Eigen::MatrixXd& profiles() const { return profiles_; }
  Eigen::VectorXd profile(int l) const;

  /// Same field with degrees above `l` dropped or zero degrees appended.
  ModalField with_lmax(int l) const;
  /// Largest degree with a nonzero profile (0 for the zero field).
  int effective_lmax() const;

  double value(double r, double t) const;
  /// Value at radial node i and angular coordinate t.
  double value_at_node(int i, double t) const;
  /// max_r (|f_lmax| + |f_{lmax-1}|) / max_r |f_0|, the angular truncation indicator.
  double angular_tail() const;
  TensorSamples synthesize(const AngularRule& rule) const;

  /// Throws GridMismatch unless the two fields share grid, dimension and axis.
  void require_compatible(const ModalField& other) const;
  bool compatible(const ModalField& other) const;

  /// |f_l(r_1)| / r_1^l for the first radial node.
  double origin_coefficient(int l) const;

 private:
  std::shared_ptr<const RadialGrid> grid_;
  Eigen::MatrixXd profiles_;
  std::vector<double> axis_;
};

/// Unit axis; empty input means the last coordinate axis.
std::vector<double> normalize_axis(const Dimension& dim, std::vector<double> axis);

enum class FieldOp { Add, Sub, Scale };

/// Degree-wise linear combination. For Scale, `b` is ignored and `factor` used.
ModalField field_algebra(const ModalField& a, const ModalField& b, FieldOp op, double factor = 1.0);
ModalField operator+(const ModalField& a, const ModalField& b);
ModalField operator-(const ModalField& a, const ModalField& b);
ModalField operator*(double c, const ModalField& a);

class ZonalSphereField {
 public:
  ZonalSphereField(std::shared_ptr<const SphereGrid> grid, Eigen::VectorXd samples);

  static ZonalSphereField constant(std::shared_ptr<const SphereGrid> grid, double c);
  static ZonalSphereField sample(std::shared_ptr<const SphereGrid> grid,
                                 const std::function<double(double t)>& f);

  const Dimension& dim() const { return grid_->dim(); }
  const SphereGrid& grid() const { return *grid_; }
  const std::shared_ptr<const SphereGrid>& grid_ptr() const { return grid_; }
  const Eigen::VectorXd& samples() const { return v_; }
  int size() const { return static_cast<int>(v_.size()); }

  double value(double t) const { return grid_->interpolate(v_, t); }
  double min() const { return v_.minCoeff(); }
  /// Throws NonPositiveField unless every sample is > 0.
  void require_positive(const char* what) const;

 private:
  std::shared_ptr<const SphereGrid> grid_;
  Eigen::VectorXd v_;
};

/// Zonal Laplace-Beltrami v'' + (n-1) cot(theta) v'.
ZonalSphereField sphere_zonal_laplacian(const ZonalSphereField& v);

}  // namespace bubblelab
