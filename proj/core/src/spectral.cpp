#include "bubblelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "bubblelab/functionals.hpp"

namespace bubblelab {

long long harmonic_multiplicity(int n, int l) {
  if (l < 0) return 0;
  auto binom = [](long long a, long long b) -> long long {
    if (b < 0 || a < b) return 0;
    long long r = 1;
    for (long long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  return binom(n + l - 1, l) - binom(n + l - 3, l - 2);
}

namespace {

// Spectral-element discretisation: basis g(r) N_j(xi) with N_j the C0 Lagrange
// functions on Gauss-Lobatto nodes of each xi panel and g = (2/(1+r^2))^{(n-2)/2}.
class ElementProblem {
 public:
  ElementProblem(const Dimension& dim, int l, const GridSpec& spec) : dim_(dim), l_(l), spec_(spec) {
    deg_ = spec.nodes_per_panel - 1;
    if (deg_ < 2) throw InvalidArgument("weighted_spectrum: need at least 3 nodes per panel");
    const int q = spec.nodes_per_panel;
    // Gauss-Lobatto nodes: endpoints and the roots of P_deg', i.e. Jacobi(1,1) nodes
    gll_.resize(deg_ + 1);
    gll_(0) = -1.0;
    gll_(deg_) = 1.0;
    if (deg_ > 1) {
      const GaussRule inner = gauss_jacobi(deg_ - 1, 1.0, 1.0);
      for (int i = 0; i < deg_ - 1; ++i) gll_(i + 1) = inner.nodes[i];
    }
    const GaussRule gr = gauss_legendre(q);
    gx_ = Eigen::Map<const Eigen::VectorXd>(gr.nodes.data(), q);
    gw_ = Eigen::Map<const Eigen::VectorXd>(gr.weights.data(), q);
    lag_.resize(q, deg_ + 1);
    dlag_.resize(q, deg_ + 1);
    for (int g = 0; g < q; ++g) {
      for (int j = 0; j <= deg_; ++j) {
        double v = 1.0, d = 0.0;
        for (int k = 0; k <= deg_; ++k) {
          if (k == j) continue;
          v *= (gx_(g) - gll_(k)) / (gll_(j) - gll_(k));
          double term = 1.0 / (gll_(j) - gll_(k));
          for (int m = 0; m <= deg_; ++m) {
            if (m == j || m == k) continue;
            term *= (gx_(g) - gll_(m)) / (gll_(j) - gll_(m));
          }
          d += term;
        }
        lag_(g, j) = v;
        dlag_(g, j) = d;
      }
    }
    assemble();
  }

  int dofs() const { return static_cast<int>(a_.rows()); }

  // Lowest eigenpairs (coefficients in the reduced dof space).
  void solve(int count, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) const {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a_, b_, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw Error("weighted_spectrum: eigensolver failed");
    const int k = std::min(count, dofs());
    values = es.eigenvalues().head(k);
    vectors = es.eigenvectors().leftCols(k);
  }

  double b_norm2(const Eigen::VectorXd& c) const { return c.dot(b_ * c); }

  // Profile value at radius r for reduced coefficients c.
  double evaluate(const Eigen::VectorXd& c, double r) const {
    const double xi = r / (spec_.map_scale + r);
    int k = std::clamp(static_cast<int>(std::floor(xi * spec_.panels)), 0, spec_.panels - 1);
    const double x = 2.0 * (xi * spec_.panels - k) - 1.0;
    double s = 0.0;
    for (int j = 0; j <= deg_; ++j) {
      double v = 1.0;
      for (int m = 0; m <= deg_; ++m) {
        if (m != j) v *= (x - gll_(m)) / (gll_(j) - gll_(m));
      }
      const int full = k * deg_ + j;
      const int red = full - offset_;
      if (red >= 0) s += v * c(red);
    }
    return g(r) * s;
  }

 private:
  double g(double r) const { return std::pow(2.0 / (1.0 + r * r), 0.5 * (dim_.n() - 2)); }
  double weight(double r) const {
    // U^{p-1} = n(n-2) (1+r^2)^{-2}
    const double n = dim_.n();
    return n * (n - 2.0) / ((1.0 + r * r) * (1.0 + r * r));
  }

  // Calls f(global dof base, r, measure, phi values (deg+1), dphi/dr values) per quadrature point.
  template <class F>
  void for_each_quad(F&& f) const {
    const int q = spec_.nodes_per_panel;
    const double h = 1.0 / spec_.panels;
    const double big_l = spec_.map_scale;
    const double n = dim_.n();
    Eigen::VectorXd phi(deg_ + 1), dphi(deg_ + 1);
    for (int k = 0; k < spec_.panels; ++k) {
      for (int gq = 0; gq < q; ++gq) {
        const double xi = k * h + 0.5 * h * (gx_(gq) + 1.0);
        const double r = big_l * xi / (1.0 - xi);
        const double dr_dxi = big_l / ((1.0 - xi) * (1.0 - xi));
        const double meas = 0.5 * h * gw_(gq) * dr_dxi * std::pow(r, n - 1.0);
        const double gv = g(r);
        const double gp = -(n - 2.0) * r / (1.0 + r * r) * gv;
        for (int j = 0; j <= deg_; ++j) {
          phi(j) = gv * lag_(gq, j);
          dphi(j) = gp * lag_(gq, j) + gv * dlag_(gq, j) * (2.0 / h) / dr_dxi;
        }
        f(k, r, meas, phi, dphi);
      }
    }
  }

  void assemble() {
    const int full = spec_.panels * deg_ + 1;
    offset_ = l_ > 0 ? 1 : 0;  // l >= 1: the profile vanishes at r = 0
    const int nred = full - offset_;
    a_ = Eigen::MatrixXd::Zero(nred, nred);
    b_ = Eigen::MatrixXd::Zero(nred, nred);
    const double cent = static_cast<double>(l_) * (l_ + dim_.n() - 2);
    for_each_quad([&](int k, double r, double meas, const Eigen::VectorXd& phi, const Eigen::VectorXd& dphi) {
      const double wb = meas * weight(r);
      const double wc = meas * cent / (r * r);
      for (int i = 0; i <= deg_; ++i) {
        const int gi = k * deg_ + i - offset_;
        if (gi < 0) continue;
        for (int j = 0; j <= deg_; ++j) {
          const int gj = k * deg_ + j - offset_;
          if (gj < 0) continue;
          a_(gi, gj) += meas * dphi(i) * dphi(j) + wc * phi(i) * phi(j);
          b_(gi, gj) += wb * phi(i) * phi(j);
        }
      }
    });
  }

 public:
  // B-inner product of reduced coefficients with an analytic radial profile.
  double overlap_profile(const Eigen::VectorXd& c, const std::function<double(double)>& f, double& fnorm2) const {
    double s = 0.0;
    fnorm2 = 0.0;
    for_each_quad([&](int k, double r, double meas, const Eigen::VectorXd& phi, const Eigen::VectorXd&) {
      double val = 0.0;
      for (int j = 0; j <= deg_; ++j) {
        const int gj = k * deg_ + j - offset_;
        if (gj >= 0) val += phi(j) * c(gj);
      }
      const double w = meas * weight(r);
      const double fv = f(r);
      s += w * val * fv;
      fnorm2 += w * fv * fv;
    });
    return s;
  }

 private:
  Dimension dim_;
  int l_;
  GridSpec spec_;
  int deg_ = 0;
  int offset_ = 0;
  Eigen::VectorXd gll_, gx_, gw_;
  Eigen::MatrixXd lag_, dlag_;
  Eigen::MatrixXd a_, b_;
};

std::string label_for(const Dimension& dim, int l, const ElementProblem& prob, const Eigen::VectorXd& c) {
  const double n = dim.n();
  const double cn = c.dot(c);
  if (cn == 0.0) return "";
  const double bn = prob.b_norm2(c);
  auto score = [&](const std::function<double(double)>& f) {
    double fn2 = 0.0;
    const double s = prob.overlap_profile(c, f, fn2);
    return std::abs(s) / std::sqrt(bn * fn2);
  };
  if (l == 0) {
    const double su = score([&](double r) { return std::pow(1.0 + r * r, -0.5 * (n - 2.0)); });
    if (su > 0.99) return "U";
    const double sv = score([&](double r) { return (1.0 - r * r) * std::pow(1.0 + r * r, -0.5 * n); });
    if (sv > 0.99) return "V";
  } else if (l == 1) {
    const double sw = score([&](double r) { return r * std::pow(1.0 + r * r, -0.5 * n); });
    if (sw > 0.99) return "W";
  }
  return "";
}

struct DegreeSolve {
  Eigen::VectorXd values;
  std::vector<std::string> labels;
};

DegreeSolve solve_degree(const Dimension& dim, int l, const GridSpec& spec, int count) {
  ElementProblem prob(dim, l, spec);
  Eigen::VectorXd vals;
  Eigen::MatrixXd vecs;
  prob.solve(count, vals, vecs);
  DegreeSolve out;
  out.values = vals;
  for (int i = 0; i < vals.size(); ++i) out.labels.push_back(label_for(dim, l, prob, vecs.col(i)));
  return out;
}

}  // namespace

SpectrumResult weighted_spectrum(const Dimension& dim, int lmax, const GridSpec& spec, const SpectralOptions& opts) {
  if (lmax < 0) throw InvalidArgument("weighted_spectrum: lmax must be >= 0");
  SpectrumResult res;
  res.n = dim.n();
  res.p = dim.p();
  const double cutoff = opts.cutoff_factor * dim.p();
  GridSpec fine = spec;
  fine.panels *= 2;
  res.extrapolation_ok = true;
  for (int l = 0; l <= lmax; ++l) {
    const DegreeSolve c = solve_degree(dim, l, spec, opts.count);
    const DegreeSolve f = solve_degree(dim, l, fine, opts.count);
    DegreeSpectrum ds;
    ds.l = l;
    ds.converged = true;
    for (int i = 0; i < f.values.size() && i < c.values.size(); ++i) {
      if (!(f.values(i) < cutoff)) break;
      const double change = std::abs(f.values(i) - c.values(i)) / std::abs(f.values(i));
      ds.values.push_back(f.values(i));
      ds.values_coarse.push_back(c.values(i));
      ds.labels.push_back(f.labels[i]);
      ds.max_rel_change = std::max(ds.max_rel_change, change);
      if (change > opts.two_grid_tol) ds.converged = false;
    }
    res.extrapolation_ok = res.extrapolation_ok && ds.converged;
    res.per_degree[l] = std::move(ds);
  }

  struct Item {
    double v;
    int l;
  };
  std::vector<Item> items;
  for (const auto& [l, ds] : res.per_degree) {
    for (double v : ds.values) items.push_back({v, l});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.v < b.v; });
  for (const auto& it : items) {
    if (!res.bands.empty() && std::abs(it.v - res.bands.back().value) <= 1e-6 * it.v) {
      res.bands.back().multiplicity += harmonic_multiplicity(dim.n(), it.l);
      res.bands.back().degrees.push_back(it.l);
    } else {
      res.bands.push_back({it.v, harmonic_multiplicity(dim.n(), it.l), {it.l}});
    }
  }

  res.Lambda = std::numeric_limits<double>::infinity();
  for (const auto& [l, ds] : res.per_degree) {
    for (std::size_t i = 0; i < ds.values.size(); ++i) {
      if (ds.labels[i].empty()) res.Lambda = std::min(res.Lambda, ds.values[i]);
    }
  }
  res.gap_ok = std::isfinite(res.Lambda) && res.Lambda > dim.p();
  return res;
}

std::vector<Eigenpair> weighted_eigenpairs(const RadialGrid& grid, int l, int count, const GridSpec& spec) {
  const Dimension& dim = grid.dim();
  ElementProblem prob(dim, l, spec);
  Eigen::VectorXd vals;
  Eigen::MatrixXd vecs;
  prob.solve(count, vals, vecs);
  const double nl = AngularRule::for_degree(dim, l).get()->norms()(l);
  std::vector<Eigenpair> out;
  for (int i = 0; i < vals.size(); ++i) {
    Eigenpair e;
    e.value = vals(i);
    e.l = l;
    const double scale = 1.0 / std::sqrt(prob.b_norm2(vecs.col(i)) * nl);
    e.profile.resize(grid.size());
    for (int k = 0; k < grid.size(); ++k) e.profile(k) = scale * prob.evaluate(vecs.col(i), grid.r()(k));
    out.push_back(std::move(e));
  }
  return out;
}

BubbleBasis unit_basis(std::shared_ptr<const RadialGrid> grid) {
  return bubble_basis(std::move(grid), BubbleParams::centered(grid->dim()));
}

double weighted_mass(const ModalField& rho) {
  const Dimension& dim = rho.dim();
  const RadialGrid& g = rho.grid();
  const auto rule = AngularRule::for_degree(dim, rho.lmax());
  const double n = dim.n();
  const Eigen::ArrayXd wt = n * (n - 2.0) * (1.0 + g.r().array().square()).square().inverse();
  double s = 0.0;
  for (int l = 0; l <= rho.lmax(); ++l) {
    s += rule->norms()(l) * g.weights().dot((wt * rho.profiles().col(l).array().square()).matrix());
  }
  return s;
}

double rayleigh_quotient(const ModalField& rho) {
  const double den = weighted_mass(rho);
  if (!(den > 0.0)) throw InvalidArgument("rayleigh_quotient: degenerate denominator");
  return dirichlet(rho) / den;
}

ModalField orthogonalize(const ModalField& rho, const BubbleBasis& basis) {
  const ModalField* xs[3] = {&basis.U, &basis.V, &basis.W};
  Eigen::Matrix3d gram;
  Eigen::Vector3d rhs;
  for (int i = 0; i < 3; ++i) {
    rhs(i) = dirichlet_inner(*xs[i], rho);
    for (int j = 0; j < 3; ++j) gram(i, j) = dirichlet_inner(*xs[i], *xs[j]);
  }
  const Eigen::Vector3d c = gram.ldlt().solve(rhs);
  ModalField out = rho;
  for (int i = 0; i < 3; ++i) out = out - c(i) * *xs[i];
  return out;
}

RayleighReport rayleigh_gap_check(const std::vector<ModalField>& trials, const BubbleBasis& basis, bool project) {
  RayleighReport rep;
  rep.min_quotient = std::numeric_limits<double>::infinity();
  for (const auto& t : trials) {
    const ModalField f = project ? orthogonalize(t, basis) : t;
    const double den = weighted_mass(f);
    if (!(den > 1e-14 * std::max(1.0, weighted_mass(t))))
      throw InvalidArgument("rayleigh_gap_check: degenerate denominator");
    const double q = dirichlet(f) / den;
    rep.quotients.push_back(q);
    rep.min_quotient = std::min(rep.min_quotient, q);
  }
  return rep;
}

std::vector<ModalField> random_trial_fields(std::shared_ptr<const RadialGrid> grid, int count, std::uint64_t seed,
                                            int lmax, int poly_degree) {
  if (count < 0 || lmax < 0 || poly_degree < 0) throw InvalidArgument("random_trial_fields: negative size");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Dimension& dim = grid->dim();
  const int nr = grid->size();
  std::vector<ModalField> out;
  for (int c = 0; c < count; ++c) {
    Eigen::MatrixXd prof(nr, lmax + 1);
    for (int l = 0; l <= lmax; ++l) {
      std::vector<double> coef(poly_degree + 1);
      for (double& x : coef) x = normal(rng);
      for (int i = 0; i < nr; ++i) {
        const double r = grid->r()(i);
        const double s = (r * r - 1.0) / (r * r + 1.0);
        double poly = 0.0;
        for (int k = poly_degree; k >= 0; --k) poly = poly * s + coef[k];
        const double g = std::pow(2.0 / (1.0 + r * r), 0.5 * (dim.n() - 2));
        prof(i, l) = g * std::pow(2.0 * r / (1.0 + r * r), l) * poly;
      }
    }
    out.emplace_back(grid, std::move(prof));
  }
  return out;
}

}  // namespace bubblelab
