#include "bubblelab/functionals.hpp"

#include <cmath>

#include "bubblelab/bubble.hpp"

namespace bubblelab {

namespace {

struct TensorWeights {
  std::shared_ptr<const AngularRule> rule;
  Eigen::MatrixXd w;  // radial weight times angular weight
};

TensorWeights tensor_weights(const ModalField& u) {
  TensorWeights tw;
  tw.rule = integration_rule(u.dim(), u.lmax());
  tw.w = u.grid().weights() * tw.rule->weights().transpose();
  return tw;
}

void require_positive(const Eigen::MatrixXd& u, const char* what) {
  if (!(u.minCoeff() > 0.0)) throw NonPositiveField(std::string(what) + ": field must be positive on the grid");
}

double sum_weighted(const Eigen::MatrixXd& w, const Eigen::MatrixXd& f, const char* what) {
  const double s = w.cwiseProduct(f).sum();
  if (!std::isfinite(s)) throw NonPositiveField(std::string(what) + ": non-finite integrand");
  return s;
}

}  // namespace

std::shared_ptr<const AngularRule> integration_rule(const Dimension& dim, int lmax) {
  const int m = lmax == 0 ? 1 : 2 * lmax + 16;
  return std::make_shared<const AngularRule>(dim, lmax, m);
}

double dirichlet_inner(const ModalField& a, const ModalField& b) {
  a.require_compatible(b);
  const RadialGrid& g = a.grid();
  const int n = a.dim().n();
  const int lmax = std::min(a.lmax(), b.lmax());
  const auto rule = AngularRule::for_degree(a.dim(), lmax);
  const Eigen::ArrayXd r2 = g.r().array().square();
  double total = 0.0;
  for (int l = 0; l <= lmax; ++l) {
    const Eigen::VectorXd fa = a.profiles().col(l), fb = b.profiles().col(l);
    const Eigen::ArrayXd da = g.derivative(fa).array(), db = g.derivative(fb).array();
    const double cent = static_cast<double>(l) * (l + n - 2);
    const Eigen::VectorXd integrand = (da * db + cent * fa.array() * fb.array() / r2).matrix();
    total += rule->norms()(l) * g.weights().dot(integrand);
  }
  return total;
}

double dirichlet(const ModalField& u) { return dirichlet_inner(u, u); }

double dirichlet_physical(const ModalField& u) {
  const TensorWeights tw = tensor_weights(u);
  const TensorSamples s = u.synthesize(*tw.rule);
  const Eigen::ArrayXd r2 = u.grid().r().array().square();
  const Eigen::ArrayXd sin2 = 1.0 - tw.rule->t().array().square();
  Eigen::MatrixXd g = s.u_r.array().square();
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    g.col(j).array() += sin2(j) * s.u_t.col(j).array().square() / r2;
  }
  return sum_weighted(tw.w, g, "dirichlet_physical");
}

double mass(const ModalField& u) {
  const TensorWeights tw = tensor_weights(u);
  const TensorSamples s = u.synthesize(*tw.rule);
  require_positive(s.u, "mass");
  return sum_weighted(tw.w, s.u.array().pow(u.dim().two_star()).matrix(), "mass");
}

double critical_norm_power(const ModalField& u) {
  const TensorWeights tw = tensor_weights(u);
  const TensorSamples s = u.synthesize(*tw.rule);
  return sum_weighted(tw.w, s.u.array().abs().pow(u.dim().two_star()).matrix(), "critical_norm_power");
}

double k0(const ModalField& u) { return dirichlet(u) / mass(u); }

ModalField laplacian(const ModalField& u) {
  Eigen::MatrixXd m(u.profiles().rows(), u.profiles().cols());
  for (int l = 0; l <= u.lmax(); ++l) m.col(l) = u.grid().mode_laplacian(u.profiles().col(l), l);
  return ModalField(u.grid_ptr(), std::move(m), u.axis());
}

double deficit(const ModalField& u, const ModalField* K) {
  const Dimension& dim = u.dim();
  const int lmax = K ? std::max(u.lmax(), K->lmax()) : u.lmax();
  const auto rule = integration_rule(dim, lmax);
  const Eigen::MatrixXd w = u.grid().weights() * rule->weights().transpose();
  const Eigen::MatrixXd uu = u.synthesize(*rule).u;
  require_positive(uu, "deficit");
  const double p = dim.p();
  const double kz = dirichlet(u) / sum_weighted(w, uu.array().pow(dim.two_star()).matrix(), "deficit");
  const Eigen::ArrayXXd up = uu.array().pow(p);
  Eigen::ArrayXXd res;
  if (K) {
    u.require_compatible(*K);
    res = (K->synthesize(*rule).u.array() - kz) * up;
  } else {
    res = laplacian(u).synthesize(*rule).u.array() + kz * up;
  }
  const double q = dim.dual_exponent();
  return std::pow(sum_weighted(w, res.abs().pow(q).matrix(), "deficit"), 1.0 / q);
}

double flow_energy_J(const ModalField& w) {
  return 0.5 * dirichlet(w) - w.dim().c_flow() * mass(w) / w.dim().two_star();
}

double dissipation(const ModalField& w) {
  const Dimension& dim = w.dim();
  const auto rule = integration_rule(dim, w.lmax());
  const Eigen::MatrixXd wt = w.grid().weights() * rule->weights().transpose();
  const Eigen::ArrayXXd ww = w.synthesize(*rule).u.array();
  require_positive(ww.matrix(), "dissipation");
  const Eigen::ArrayXXd lap = laplacian(w).synthesize(*rule).u.array();
  const Eigen::ArrayXXd q = lap / ww.pow(dim.p()) + dim.c_flow();
  return sum_weighted(wt, (q.square() * ww.pow(dim.two_star())).matrix(), "dissipation");
}

double energy_gap_I(const ModalField& w, double j_reference) { return flow_energy_J(w) - j_reference; }

FunctionalReport functional_report(const ModalField& u, const ModalField* K, std::optional<double> j_reference) {
  FunctionalReport r;
  r.dirichlet = dirichlet(u);
  r.mass = mass(u);
  r.K0 = r.dirichlet / r.mass;
  r.delta = deficit(u, K);
  r.J = 0.5 * r.dirichlet - u.dim().c_flow() * r.mass / u.dim().two_star();
  if (j_reference) r.I = r.J - *j_reference;
  return r;
}

double stationary_energy(const Dimension& dim) {
  const double n = dim.n();
  return sobolev_power(dim) * std::pow(dim.c_flow(), -0.5 * (n - 2.0)) * (0.5 - 1.0 / dim.two_star());
}

// ---------------------------------------------------------------------------

double conformal_energy(const ZonalSphereField& v) {
  const SphereGrid& g = v.grid();
  const Eigen::ArrayXd vt = (g.diff() * v.samples()).array();
  const Eigen::ArrayXd sin2 = 1.0 - g.t().array().square();
  const Eigen::VectorXd f = (sin2 * vt.square() + v.dim().sphere_shift() * v.samples().array().square()).matrix();
  return g.integral(f);
}

double mass(const ZonalSphereField& v) {
  v.require_positive("mass");
  return v.grid().integral(v.samples().array().pow(v.dim().two_star()).matrix());
}

double k0(const ZonalSphereField& v) { return conformal_energy(v) / mass(v); }

double deficit(const ZonalSphereField& v) {
  const Dimension& dim = v.dim();
  const double kz = k0(v);
  const Eigen::ArrayXd vv = v.samples().array();
  const Eigen::ArrayXd res =
      (v.grid().laplacian() * v.samples()).array() - dim.sphere_shift() * vv + kz * vv.pow(dim.p());
  const double q = dim.dual_exponent();
  return std::pow(v.grid().integral(res.abs().pow(q).matrix()), 1.0 / q);
}

double flow_energy_J(const ZonalSphereField& v) {
  return 0.5 * conformal_energy(v) - v.dim().c_flow() * mass(v) / v.dim().two_star();
}

double energy_gap_I(const ZonalSphereField& v, double j_reference) { return flow_energy_J(v) - j_reference; }

double dissipation(const ZonalSphereField& v) {
  const Dimension& dim = v.dim();
  v.require_positive("dissipation");
  const Eigen::ArrayXd vv = v.samples().array();
  const Eigen::ArrayXd op = (v.grid().laplacian() * v.samples()).array() - dim.sphere_shift() * vv;
  const Eigen::ArrayXd q = op / vv.pow(dim.p()) + dim.c_flow();
  return v.grid().integral((q.square() * vv.pow(dim.two_star())).matrix());
}

double delta_bound_rhs(const ZonalSphereField& v) {
  return std::pow(mass(v), 2.0 / v.dim().n()) * dissipation(v);
}

FunctionalReport functional_report(const ZonalSphereField& v, std::optional<double> j_reference) {
  FunctionalReport r;
  r.dirichlet = conformal_energy(v);
  r.mass = mass(v);
  r.K0 = r.dirichlet / r.mass;
  r.delta = deficit(v);
  r.J = 0.5 * r.dirichlet - v.dim().c_flow() * r.mass / v.dim().two_star();
  if (j_reference) r.I = r.J - *j_reference;
  return r;
}

}  // namespace bubblelab
