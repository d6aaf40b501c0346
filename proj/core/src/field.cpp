#include "bubblelab/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bubblelab {

std::vector<double> normalize_axis(const Dimension& dim, std::vector<double> axis) {
  if (axis.empty()) {
    axis.assign(dim.n(), 0.0);
    axis.back() = 1.0;
    return axis;
  }
  if (static_cast<int>(axis.size()) != dim.n())
    throw InvalidArgument("ModalField: axis length must equal n");
  double norm = 0.0;
  for (double a : axis) norm += a * a;
  norm = std::sqrt(norm);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidArgument("ModalField: axis must be nonzero");
  for (double& a : axis) a /= norm;
  return axis;
}

ModalField::ModalField(std::shared_ptr<const RadialGrid> grid, Eigen::MatrixXd profiles,
                       std::vector<double> axis)
    : grid_(std::move(grid)), profiles_(std::move(profiles)) {
  if (!grid_) throw InvalidArgument("ModalField: null grid");
  if (profiles_.rows() != grid_->size())
    throw GridMismatch("ModalField: profile length does not match grid");
  if (profiles_.cols() < 1) throw InvalidArgument("ModalField: need at least the l = 0 profile");
  if (!profiles_.allFinite()) throw NonPositiveField("ModalField: non-finite profile values");
  axis_ = normalize_axis(grid_->dim(), std::move(axis));
}

ModalField ModalField::zero(std::shared_ptr<const RadialGrid> grid, int lmax, std::vector<double> axis) {
  if (lmax < 0) throw InvalidArgument("ModalField: lmax must be >= 0");
  const auto rows = grid ? grid->size() : 0;
  return ModalField(std::move(grid), Eigen::MatrixXd::Zero(rows, lmax + 1), std::move(axis));
}

ModalField ModalField::radial(std::shared_ptr<const RadialGrid> grid, Eigen::VectorXd profile,
                              std::vector<double> axis) {
  Eigen::MatrixXd m = std::move(profile);
  return ModalField(std::move(grid), std::move(m), std::move(axis));
}

ModalField ModalField::sample(std::shared_ptr<const RadialGrid> grid, int lmax,
                              const std::function<double(double, double)>& f,
                              std::vector<double> axis, int angular_nodes) {
  return sample_nodes(
      std::move(grid), lmax, [&f](int, double r, double t) { return f(r, t); }, std::move(axis),
      angular_nodes);
}

ModalField ModalField::sample_nodes(std::shared_ptr<const RadialGrid> grid, int lmax,
                                    const std::function<double(int, double, double)>& f,
                                    std::vector<double> axis, int angular_nodes) {
  if (!grid) throw InvalidArgument("ModalField: null grid");
  if (lmax < 0) throw InvalidArgument("ModalField: lmax must be >= 0");
  const int m = angular_nodes > 0 ? angular_nodes : AngularRule::default_nodes(lmax);
  const AngularRule rule(grid->dim(), lmax, m);
  const int nr = grid->size();
  Eigen::MatrixXd vals(nr, m);
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < m; ++j) vals(i, j) = f(i, grid->r()(i), rule.t()(j));
  }
  // f_l = sum_j w_j f(., t_j) P_l(t_j) / N_l
  Eigen::MatrixXd proj = rule.harmonics();
  for (int l = 0; l <= lmax; ++l) {
    proj.col(l) = proj.col(l).cwiseProduct(rule.weights()) / rule.norms()(l);
  }
  return ModalField(std::move(grid), vals * proj, std::move(axis));
}

ModalField ModalField::sample_adaptive(std::shared_ptr<const RadialGrid> grid,
                                       const std::function<double(int, double, double)>& f,
                                       double tol, int start, int cap, std::vector<double> axis) {
  if (!grid) throw InvalidArgument("ModalField: null grid");
  int lmax = std::max(start, 2);
  while (true) {
    ModalField m = sample_nodes(grid, lmax, f, axis);
    if (m.angular_tail() <= tol) return m;
    if (lmax >= cap) {
      throw Unresolved("ModalField::sample_adaptive: angular expansion unresolved at lmax " +
                       std::to_string(lmax));
    }
    lmax = std::min(2 * lmax, cap);
  }
}

Eigen::VectorXd ModalField::profile(int l) const {
  if (l < 0) throw InvalidArgument("ModalField::profile: l must be >= 0");
  if (l > lmax()) return Eigen::VectorXd::Zero(profiles_.rows());
  return profiles_.col(l);
}

ModalField ModalField::with_lmax(int l) const {
  if (l < 0) throw InvalidArgument("ModalField::with_lmax: l must be >= 0");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(profiles_.rows(), l + 1);
  const int keep = std::min(l, lmax()) + 1;
  m.leftCols(keep) = profiles_.leftCols(keep);
  return ModalField(grid_, std::move(m), axis_);
}

int ModalField::effective_lmax() const {
  for (int l = lmax(); l > 0; --l) {
    if (profiles_.col(l).cwiseAbs().maxCoeff() > 0.0) return l;
  }
  return 0;
}

double ModalField::value(double r, double t) const {
  std::vector<double> p(lmax() + 1);
  zonal_polynomials(dim().n(), lmax(), t, p.data());
  double s = 0.0;
  for (int l = 0; l <= lmax(); ++l) s += grid_->interpolate(profiles_.col(l), r) * p[l];
  return s;
}

double ModalField::value_at_node(int i, double t) const {
  std::vector<double> p(lmax() + 1);
  zonal_polynomials(dim().n(), lmax(), t, p.data());
  double s = 0.0;
  for (int l = 0; l <= lmax(); ++l) s += profiles_(i, l) * p[l];
  return s;
}

double ModalField::angular_tail() const {
  const double base = profiles_.col(0).cwiseAbs().maxCoeff();
  if (lmax() == 0) return 0.0;
  const double top = lmax() == 1 ? profiles_.col(1).cwiseAbs().maxCoeff()
                                 : (profiles_.col(lmax()).cwiseAbs() +
                                    profiles_.col(lmax() - 1).cwiseAbs())
                                       .maxCoeff();
  if (base == 0.0) return top == 0.0 ? 0.0 : INFINITY;
  return top / base;
}

TensorSamples ModalField::synthesize(const AngularRule& rule) const {
  if (rule.lmax() < lmax())
    throw InvalidArgument("ModalField::synthesize: angular rule has too low a degree");
  const auto cols = profiles_.cols();
  Eigen::MatrixXd dprof(profiles_.rows(), cols);
  for (Eigen::Index l = 0; l < cols; ++l) dprof.col(l) = grid_->derivative(profiles_.col(l));
  const auto p = rule.harmonics().leftCols(cols);
  const auto dp = rule.harmonic_derivatives().leftCols(cols);
  TensorSamples out;
  out.u.noalias() = profiles_ * p.transpose();
  out.u_r.noalias() = dprof * p.transpose();
  out.u_t.noalias() = profiles_ * dp.transpose();
  return out;
}

bool ModalField::compatible(const ModalField& other) const {
  return grid_->same_as(*other.grid_) && axis_ == other.axis_;
}

void ModalField::require_compatible(const ModalField& other) const {
  if (!(dim() == other.dim())) throw GridMismatch("ModalField: dimensions differ");
  if (!grid_->same_as(*other.grid_)) throw GridMismatch("ModalField: radial grids differ");
  if (axis_ != other.axis_) throw GridMismatch("ModalField: symmetry axes differ");
}

double ModalField::origin_coefficient(int l) const {
  const double r1 = grid_->r()(0);
  return std::abs(profile(l)(0)) / std::pow(r1, l);
}

ModalField field_algebra(const ModalField& a, const ModalField& b, FieldOp op, double factor) {
  if (op == FieldOp::Scale) {
    if (!std::isfinite(factor)) throw InvalidArgument("field_algebra: non-finite factor");
    return ModalField(a.grid_ptr(), factor * a.profiles(), a.axis());
  }
  a.require_compatible(b);
  const int l = std::max(a.lmax(), b.lmax());
  Eigen::MatrixXd m = a.with_lmax(l).profiles();
  if (op == FieldOp::Add) {
    m.leftCols(b.lmax() + 1) += b.profiles();
  } else {
    m.leftCols(b.lmax() + 1) -= b.profiles();
  }
  return ModalField(a.grid_ptr(), std::move(m), a.axis());
}

ModalField operator+(const ModalField& a, const ModalField& b) { return field_algebra(a, b, FieldOp::Add); }
ModalField operator-(const ModalField& a, const ModalField& b) { return field_algebra(a, b, FieldOp::Sub); }
ModalField operator*(double c, const ModalField& a) { return field_algebra(a, a, FieldOp::Scale, c); }

// ---------------------------------------------------------------------------

ZonalSphereField::ZonalSphereField(std::shared_ptr<const SphereGrid> grid, Eigen::VectorXd samples)
    : grid_(std::move(grid)), v_(std::move(samples)) {
  if (!grid_) throw InvalidArgument("ZonalSphereField: null grid");
  if (v_.size() != grid_->size()) throw GridMismatch("ZonalSphereField: sample count does not match grid");
  if (!v_.allFinite()) throw NonPositiveField("ZonalSphereField: non-finite samples");
}

ZonalSphereField ZonalSphereField::constant(std::shared_ptr<const SphereGrid> grid, double c) {
  const int n = grid ? grid->size() : 0;
  return ZonalSphereField(std::move(grid), Eigen::VectorXd::Constant(n, c));
}

ZonalSphereField ZonalSphereField::sample(std::shared_ptr<const SphereGrid> grid,
                                          const std::function<double(double)>& f) {
  if (!grid) throw InvalidArgument("ZonalSphereField: null grid");
  Eigen::VectorXd v(grid->size());
  for (int i = 0; i < grid->size(); ++i) v(i) = f(grid->t()(i));
  return ZonalSphereField(std::move(grid), std::move(v));
}

void ZonalSphereField::require_positive(const char* what) const {
  if (!(v_.minCoeff() > 0.0))
    throw NonPositiveField(std::string(what) + ": field must be strictly positive");
}

ZonalSphereField sphere_zonal_laplacian(const ZonalSphereField& v) {
  return ZonalSphereField(v.grid_ptr(), v.grid().laplacian() * v.samples());
}

}  // namespace bubblelab
