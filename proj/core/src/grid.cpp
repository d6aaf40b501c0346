#include "bubblelab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace bubblelab {

GaussRule gauss_jacobi(int count, double alpha, double beta) {
  if (count < 1) throw InvalidArgument("gauss_jacobi: count must be >= 1");
  if (alpha <= -1.0 || beta <= -1.0) throw InvalidArgument("gauss_jacobi: alpha, beta must be > -1");

  const double ab = alpha + beta;
  Eigen::VectorXd diag(count), sub(std::max(count - 1, 1));
  for (int k = 0; k < count; ++k) {
    if (alpha == beta) {
      diag(k) = 0.0;
    } else if (k == 0) {
      diag(k) = (beta - alpha) / (ab + 2.0);
    } else {
      const double s = 2.0 * k + ab;
      diag(k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
  }
  for (int k = 1; k < count; ++k) {
    const double s = 2.0 * k + ab;
    const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
    const double den = s * s * (s + 1.0) * (s - 1.0);
    sub(k - 1) = std::sqrt(num / den);
  }

  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));

  GaussRule rule;
  rule.nodes.resize(count);
  rule.weights.resize(count);
  if (count == 1) {
    rule.nodes[0] = diag(0);
    rule.weights[0] = mu0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub.head(count - 1), Eigen::ComputeEigenvectors);
  if (eig.info() != Eigen::Success) throw Error("gauss_jacobi: eigensolver failed");
  for (int i = 0; i < count; ++i) {
    rule.nodes[i] = eig.eigenvalues()(i);
    const double v0 = eig.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  if (alpha == beta) {
    // symmetrise to remove eigensolver noise
    for (int i = 0; i < count / 2; ++i) {
      const int j = count - 1 - i;
      const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
      const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
      rule.nodes[i] = -x;
      rule.nodes[j] = x;
      rule.weights[i] = rule.weights[j] = w;
    }
    if (count % 2 == 1) rule.nodes[count / 2] = 0.0;
  }
  return rule;
}

Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& nodes) {
  const auto n = nodes.size();
  Eigen::VectorXd w(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double prod = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != j) prod *= 2.0 * (nodes(j) - nodes(k));
    }
    w(j) = 1.0 / prod;
  }
  return w / w.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd differentiation_matrix(const Eigen::VectorXd& nodes) {
  const auto n = nodes.size();
  const Eigen::VectorXd w = barycentric_weights(nodes);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = (w(j) / w(i)) / (nodes(i) - nodes(j));
      row += d(i, j);
    }
    d(i, i) = -row;
  }
  return d;
}

double barycentric_interpolate(const Eigen::VectorXd& nodes, const Eigen::VectorXd& bary,
                               const Eigen::VectorXd& values, double x) {
  double num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < nodes.size(); ++j) {
    const double diff = x - nodes(j);
    if (diff == 0.0) return values(j);
    const double c = bary(j) / diff;
    num += c * values(j);
    den += c;
  }
  return num / den;
}

void zonal_polynomials(int d, int lmax, double t, double* values, double* derivatives) {
  if (lmax < 0) throw InvalidArgument("zonal_polynomials: lmax must be >= 0");
  if (d < 3) throw InvalidArgument("zonal_polynomials: d must be >= 3");
  values[0] = 1.0;
  if (derivatives) derivatives[0] = 0.0;
  if (lmax == 0) return;
  values[1] = t;
  if (derivatives) derivatives[1] = 1.0;
  for (int k = 1; k < lmax; ++k) {
    const double a = 2.0 * k + d - 2.0;
    const double c = k + d - 2.0;
    values[k + 1] = (a * t * values[k] - k * values[k - 1]) / c;
    if (derivatives) {
      derivatives[k + 1] =
          (a * (values[k] + t * derivatives[k]) - k * derivatives[k - 1]) / c;
    }
  }
}

// ---------------------------------------------------------------------------

RadialGrid::RadialGrid(const Dimension& dim, const GridSpec& spec) : dim_(dim), spec_(spec) {
  if (!(spec.map_scale > 0.0) || !std::isfinite(spec.map_scale))
    throw InvalidArgument("RadialGrid: map_scale must be positive");
  if (spec.panels < 1) throw InvalidArgument("RadialGrid: panels must be >= 1");
  if (spec.nodes_per_panel < 2) throw InvalidArgument("RadialGrid: nodes_per_panel must be >= 2");

  const int q = spec.nodes_per_panel;
  const GaussRule ref = gauss_legendre(q);
  ref_nodes_ = Eigen::Map<const Eigen::VectorXd>(ref.nodes.data(), q);
  ref_weights_ = Eigen::Map<const Eigen::VectorXd>(ref.weights.data(), q);
  ref_bary_ = barycentric_weights(ref_nodes_);
  ref_diff_ = differentiation_matrix(ref_nodes_);

  const int total = spec.panels * q;
  xi_.resize(total);
  r_.resize(total);
  w_.resize(total);
  dxi_dr_.resize(total);
  const double h = 1.0 / spec.panels;
  const double big_l = spec.map_scale;
  const int nm1 = dim.n() - 1;
  for (int k = 0; k < spec.panels; ++k) {
    const double a = k * h;
    for (int j = 0; j < q; ++j) {
      const int i = k * q + j;
      const double xi = a + 0.5 * h * (ref_nodes_(j) + 1.0);
      const double one_m = 1.0 - xi;
      xi_(i) = xi;
      r_(i) = big_l * xi / one_m;
      const double dr_dxi = big_l / (one_m * one_m);
      dxi_dr_(i) = 1.0 / dr_dxi;
      w_(i) = 0.5 * h * ref_weights_(j) * dr_dxi * std::pow(r_(i), nm1);
    }
  }
}

std::shared_ptr<const RadialGrid> RadialGrid::make(const Dimension& dim, const GridSpec& spec) {
  return std::make_shared<const RadialGrid>(dim, spec);
}

namespace {
void check_samples(const Eigen::VectorXd& f, Eigen::Index n, const char* what) {
  if (f.size() != n) throw GridMismatch(std::string(what) + ": sample count does not match grid");
  if (!f.allFinite()) throw NonPositiveField(std::string(what) + ": non-finite samples");
}
}  // namespace

double RadialGrid::integral(const Eigen::VectorXd& f) const {
  check_samples(f, size(), "radial_integral");
  return Dimension::sphere_area(dim_.n() - 1) * w_.dot(f);
}

Eigen::VectorXd RadialGrid::derivative(const Eigen::VectorXd& f) const {
  check_samples(f, size(), "derivative");
  const int q = spec_.nodes_per_panel;
  const double scale = 2.0 * spec_.panels;
  Eigen::VectorXd out(size());
  for (int k = 0; k < spec_.panels; ++k) {
    out.segment(k * q, q).noalias() = scale * (ref_diff_ * f.segment(k * q, q));
  }
  return out.cwiseProduct(dxi_dr_);
}

Eigen::VectorXd RadialGrid::mode_laplacian(const Eigen::VectorXd& f, int l) const {
  if (l < 0) throw InvalidArgument("mode_laplacian: l must be >= 0");
  const Eigen::VectorXd d1 = derivative(f);
  const Eigen::VectorXd d2 = derivative(d1);
  const double nm1 = dim_.n() - 1.0;
  const double cent = static_cast<double>(l) * (l + dim_.n() - 2);
  Eigen::VectorXd out(size());
  for (int i = 0; i < size(); ++i) {
    const double r = r_(i);
    out(i) = d2(i) + nm1 / r * d1(i) - cent / (r * r) * f(i);
  }
  return out;
}

double RadialGrid::interpolate(const Eigen::VectorXd& f, double r) const {
  check_samples(f, size(), "interpolate");
  if (!(r >= 0.0)) throw InvalidArgument("interpolate: r must be >= 0");
  const int q = spec_.nodes_per_panel;
  const double xi = std::isinf(r) ? 1.0 : r / (spec_.map_scale + r);
  int k = static_cast<int>(std::floor(xi * spec_.panels));
  k = std::clamp(k, 0, spec_.panels - 1);
  const double x = 2.0 * (xi * spec_.panels - k) - 1.0;
  const Eigen::VectorXd local = f.segment(k * q, q);
  return barycentric_interpolate(ref_nodes_, ref_bary_, local, x);
}

double RadialGrid::resolution_tail(const Eigen::VectorXd& f) const {
  check_samples(f, size(), "resolution_tail");
  const double fmax = f.cwiseAbs().maxCoeff();
  if (fmax == 0.0) return 0.0;
  const int q = spec_.nodes_per_panel;
  std::vector<double> leg(q);
  Eigen::MatrixXd table(q, q);  // table(j, k) = P_k(x_j)
  for (int j = 0; j < q; ++j) {
    // Legendre polynomials are the zonal harmonics of S^2
    zonal_polynomials(3, q - 1, ref_nodes_(j), leg.data());
    for (int k = 0; k < q; ++k) table(j, k) = leg[k];
  }
  double worst = 0.0;
  for (int p = 0; p < spec_.panels; ++p) {
    const Eigen::VectorXd local = f.segment(p * q, q);
    double tail = 0.0;
    for (int k = std::max(0, q - 2); k < q; ++k) {
      double c = 0.0;
      for (int j = 0; j < q; ++j) c += ref_weights_(j) * local(j) * table(j, k);
      tail += std::abs(c * (2.0 * k + 1.0) / 2.0);
    }
    worst = std::max(worst, tail);
  }
  return worst / fmax;
}

GridSpec RadialGrid::refined_spec() const {
  GridSpec s = spec_;
  s.panels *= 2;
  return s;
}

// ---------------------------------------------------------------------------

SphereGrid::SphereGrid(const Dimension& dim, int nodes) : dim_(dim) {
  if (nodes < 2) throw InvalidArgument("SphereGrid: need at least 2 nodes");
  const double a = 0.5 * (dim.n() - 2);
  const GaussRule rule = gauss_jacobi(nodes, a, a);
  const double area = Dimension::sphere_area(dim.n() - 1);
  t_ = Eigen::Map<const Eigen::VectorXd>(rule.nodes.data(), nodes);
  w_ = area * Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), nodes);
  theta_ = t_.array().acos();
  bary_ = barycentric_weights(t_);
  d_ = differentiation_matrix(t_);
  const Eigen::MatrixXd d2 = d_ * d_;
  lap_.resize(nodes, nodes);
  for (int i = 0; i < nodes; ++i) {
    lap_.row(i) = (1.0 - t_(i) * t_(i)) * d2.row(i) - dim.n() * t_(i) * d_.row(i);
  }
}

std::shared_ptr<const SphereGrid> SphereGrid::make(const Dimension& dim, int nodes) {
  return std::make_shared<const SphereGrid>(dim, nodes);
}

double SphereGrid::interpolate(const Eigen::VectorXd& f, double t) const {
  check_samples(f, size(), "interpolate");
  if (!(t >= -1.0 && t <= 1.0)) throw InvalidArgument("SphereGrid::interpolate: t outside [-1, 1]");
  return barycentric_interpolate(t_, bary_, f, t);
}

double SphereGrid::resolution_tail(const Eigen::VectorXd& f) const {
  check_samples(f, size(), "resolution_tail");
  const double fmax = f.cwiseAbs().maxCoeff();
  if (fmax == 0.0) return 0.0;
  const int n = size();
  std::vector<double> z(n);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n), norm = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    zonal_polynomials(dim_.n() + 1, n - 1, t_(j), z.data());
    for (int k = 0; k < n; ++k) {
      c(k) += w_(j) * f(j) * z[k];
      norm(k) += w_(j) * z[k] * z[k];
    }
  }
  double tail = 0.0;
  for (int k = std::max(0, n - 2); k < n; ++k) tail += std::abs(c(k) / norm(k));
  return tail / fmax;
}

// ---------------------------------------------------------------------------

AngularRule::AngularRule(const Dimension& dim, int lmax, int nodes) : lmax_(lmax) {
  if (lmax < 0) throw InvalidArgument("AngularRule: lmax must be >= 0");
  if (nodes < 1) throw InvalidArgument("AngularRule: need at least one node");
  const double a = 0.5 * (dim.n() - 3);
  const GaussRule rule = gauss_jacobi(nodes, a, a);
  t_ = Eigen::Map<const Eigen::VectorXd>(rule.nodes.data(), nodes);
  w_ = Dimension::sphere_area(dim.n() - 2) *
       Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), nodes);
  p_.resize(nodes, lmax + 1);
  dp_.resize(nodes, lmax + 1);
  std::vector<double> v(lmax + 1), dv(lmax + 1);
  for (int j = 0; j < nodes; ++j) {
    zonal_polynomials(dim.n(), lmax, t_(j), v.data(), dv.data());
    for (int l = 0; l <= lmax; ++l) {
      p_(j, l) = v[l];
      dp_(j, l) = dv[l];
    }
  }
  norms_.resize(lmax + 1);
  for (int l = 0; l <= lmax; ++l) {
    norms_(l) = (w_.array() * p_.col(l).array().square()).sum();
  }
}

int AngularRule::default_nodes(int lmax) { return lmax == 0 ? 1 : (3 * lmax) / 2 + 16; }

std::shared_ptr<const AngularRule> AngularRule::for_degree(const Dimension& dim, int lmax) {
  return std::make_shared<const AngularRule>(dim, lmax, default_nodes(lmax));
}

}  // namespace bubblelab
