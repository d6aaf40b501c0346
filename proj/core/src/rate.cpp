#include "bubblelab/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bubblelab/least_squares.hpp"

namespace bubblelab {

namespace {

Eigen::VectorXd derivative(const ZonalSphereField& a) { return a.grid().diff() * a.samples(); }

double energy_inner_d(const SphereGrid& g, double shift, const Eigen::VectorXd& a, const Eigen::VectorXd& da,
                      const Eigen::VectorXd& b, const Eigen::VectorXd& db) {
  const Eigen::ArrayXd sin2 = 1.0 - g.t().array().square();
  return (g.weights().array() * (sin2 * da.array() * db.array() + shift * a.array() * b.array())).sum();
}

struct Sampled {
  Eigen::VectorXd b, db;    // bubble and its t-derivative
  Eigen::VectorXd l, dl;    // lambda d/dlambda of the bubble and its t-derivative
};

Sampled sample_bubble(const SphereGrid& g, double kappa, double lambda) {
  const Dimension& dim = g.dim();
  Sampled s;
  s.b.resize(g.size());
  s.l.resize(g.size());
  for (int j = 0; j < g.size(); ++j) {
    s.b(j) = sphere_bubble(dim, kappa, lambda, g.t()(j));
    s.l(j) = lambda * sphere_bubble_dlambda(dim, kappa, lambda, g.t()(j));
  }
  s.db = g.diff() * s.b;
  s.dl = g.diff() * s.l;
  return s;
}

double grad_norm(const ZonalSphereField& a) { return std::sqrt(std::max(0.0, energy_inner(a, a))); }

double trapezoid(const std::vector<double>& x, const std::vector<double>& y, std::size_t i0, std::size_t i1) {
  double acc = 0.0;
  for (std::size_t i = i0; i < i1; ++i) acc += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return acc;
}

}  // namespace

double energy_inner(const ZonalSphereField& a, const ZonalSphereField& b) {
  if (!a.grid().same_as(b.grid())) throw GridMismatch("energy_inner: different sphere grids");
  return energy_inner_d(a.grid(), a.dim().sphere_shift(), a.samples(), derivative(a), b.samples(), derivative(b));
}

ZonalFit fit_zonal_bubble(const ZonalSphereField& v, double kappa, bool fit_amplitude) {
  const SphereGrid& g = v.grid();
  const double shift = v.dim().sphere_shift();
  const Eigen::VectorXd dv = derivative(v);
  const double ev = energy_inner_d(g, shift, v.samples(), dv, v.samples(), dv);
  const int np = fit_amplitude ? 2 : 1;

  ModelFunction model = [&](const Eigen::VectorXd& x) {
    GaussNewtonModel m;
    if (!x.allFinite() || std::abs(x(0)) > 30.0) {
      m.valid = false;
      return m;
    }
    const double lambda = std::exp(x(0));
    const double amp = fit_amplitude ? std::exp(x(1)) : 1.0;
    const Sampled s = sample_bubble(g, kappa, lambda);
    const Eigen::VectorXd r = v.samples() - amp * s.b;
    const Eigen::VectorXd dr = dv - amp * s.db;
    m.cost = 0.5 * energy_inner_d(g, shift, r, dr, r, dr);
    m.cost_noise = 1e-14 * ev;
    std::vector<Eigen::VectorXd> cols{amp * s.l}, dcols{amp * s.dl};
    if (fit_amplitude) {
      cols.push_back(amp * s.b);
      dcols.push_back(amp * s.db);
    }
    m.gradient.resize(np);
    m.normal.resize(np, np);
    for (int i = 0; i < np; ++i) {
      m.gradient(i) = -energy_inner_d(g, shift, r, dr, cols[i], dcols[i]);
      for (int k = 0; k < np; ++k) m.normal(i, k) = energy_inner_d(g, shift, cols[i], dcols[i], cols[k], dcols[k]);
    }
    return m;
  };

  LeastSquaresOptions opts;
  opts.gradient_tol = 1e-12 * std::max(ev, 1e-300);
  ZonalFit best;
  best.cost = std::numeric_limits<double>::infinity();
  for (double l0 : {0.0, 1.0, -1.0, 2.0, -2.0}) {
    Eigen::VectorXd x0(np);
    x0(0) = l0;
    if (fit_amplitude) {
      const Sampled s = sample_bubble(g, kappa, std::exp(l0));
      const double bb = energy_inner_d(g, shift, s.b, s.db, s.b, s.db);
      const double vb = energy_inner_d(g, shift, v.samples(), dv, s.b, s.db);
      x0(1) = std::log(std::max(vb / bb, 1e-3));
    }
    const LeastSquaresResult r = levenberg_marquardt(model, x0, opts);
    if (r.cost < best.cost * (1.0 - 1e-12) || (!best.converged && r.converged && r.cost <= best.cost)) {
      best.lambda = std::exp(r.x(0));
      best.amplitude = fit_amplitude ? std::exp(r.x(1)) : 1.0;
      best.cost = r.cost;
      best.converged = r.converged;
      best.iterations = r.iterations;
    }
    if (best.converged && best.cost <= 1e-14 * ev) break;
  }
  return best;
}

NearestStationary nearest_stationary(const ZonalSphereField& w) {
  w.require_positive("nearest_stationary");
  const Dimension& dim = w.dim();
  const ZonalFit f = fit_zonal_bubble(w, dim.c_flow(), false);
  auto sphere = w.grid_ptr();
  ZonalSphereField W = sphere_bubble_field(sphere, dim.c_flow(), f.lambda);
  ZonalSphereField rho(sphere, w.samples() - W.samples());
  ZonalSphereField dW = ZonalSphereField::sample(sphere, [&](double t) {
    return f.lambda * sphere_bubble_dlambda(dim, dim.c_flow(), f.lambda, t);
  });
  NearestStationary ns{f.lambda, 0.0, W, rho};
  ns.rho_h1 = grad_norm(rho);
  const double gw = grad_norm(w);
  ns.rho_ratio = ns.rho_h1 / gw;
  ns.orth_gradient = energy_inner(W, rho) / (grad_norm(W) * gw);
  const Eigen::ArrayXd wp = W.samples().array().pow(dim.p());
  ns.orth_power = sphere->integral((wp * rho.samples().array()).matrix()) /
                  sphere->integral((wp * w.samples().array()).matrix());
  ns.orth_lambda = energy_inner(dW, rho) / (grad_norm(dW) * gw);
  ns.converged = f.converged;
  return ns;
}

RenormalizedProfile renormalized_profile(const ZonalSphereField& w) {
  w.require_positive("renormalized_profile");
  const Dimension& dim = w.dim();
  const ZonalFit f = fit_zonal_bubble(w, 1.0, true);
  auto sphere = w.grid_ptr();
  const double K0 = k0(w);
  const double alpha = std::pow((1.0 - dim.m()) * K0, 1.0 / (dim.p() - 1.0));
  ZonalSphereField W_bar = sphere_bubble_field(sphere, K0, f.lambda);
  ZonalSphereField W_hat(sphere, alpha * W_bar.samples());
  RenormalizedProfile rp{K0, alpha, f.lambda, 0.0, f.amplitude, std::move(W_bar), std::move(W_hat)};
  const ZonalSphereField diff(sphere, w.samples() - rp.W_hat.samples());
  rp.distance = grad_norm(diff);
  rp.converged = f.converged;
  return rp;
}

ExponentialFit fit_exponential(const std::vector<double>& s, const std::vector<double>& values, double s_a,
                               double s_b) {
  if (s.size() != values.size()) throw InvalidArgument("fit_exponential: series lengths differ");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < s_a || s[i] > s_b) continue;
    if (!(values[i] > 0.0)) throw InvalidArgument("fit_exponential: non-positive value in the window");
    x.push_back(s[i]);
    y.push_back(std::log(values[i]));
  }
  if (x.size() < 10) throw InvalidArgument("fit_exponential: fewer than 10 samples in the window");
  const double k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_exponential: degenerate window");
  const double slope = sxy / sxx;
  ExponentialFit f;
  f.rate = -slope;
  f.prefactor = std::exp(my - slope * mx);
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  f.samples = static_cast<int>(x.size());
  f.s_a = x.front();
  f.s_b = x.back();
  return f;
}

double weighted_sup_residual(const ZonalSphereField& w, const RenormalizedProfile& profile) {
  if (!w.grid().same_as(profile.W_hat.grid())) throw GridMismatch("weighted_sup_residual: grids differ");
  const Dimension& dim = w.dim();
  const double k = 0.5 * (dim.n() + 2);
  double sup = 0.0;
  for (int j = 0; j < w.size(); ++j) {
    const double t = w.grid().t()(j);
    // (1 + r^{n+2}) (2/(1+r^2))^{(n+2)/2} = (1-t)^{(n+2)/2} + (1+t)^{(n+2)/2}
    const double weight = std::pow(1.0 - t, k) + std::pow(1.0 + t, k);
    const double theta = std::pow(w.samples()(j), dim.p()) - std::pow(profile.W_hat.samples()(j), dim.p());
    sup = std::max(sup, weight * std::abs(theta));
  }
  return sup;
}

double weighted_sup_residual(const ZonalSphereField& w) { return weighted_sup_residual(w, renormalized_profile(w)); }

CauchyCheck cauchy_tail_check(const Trajectory& traj, double s_a, double s_b, int pairs) {
  CauchyCheck c;
  const auto& rows = traj.diagnostics;
  if (rows.size() != traj.states.size() || rows.empty()) {
    c.reason = "trajectory has no diagnostics";
    return c;
  }
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].s >= s_a && rows[i].s <= s_b) idx.push_back(i);
  if (idx.size() < static_cast<std::size_t>(2 * pairs + 1)) {
    c.reason = "insufficient sampling density in the window";
    return c;
  }
  std::vector<double> s, d, d2;
  for (const auto& r : rows) {
    s.push_back(r.s);
    d.push_back(r.delta);
    d2.push_back(r.delta * r.delta);
  }
  const Dimension dim = traj.states.front().v.dim();
  const auto& sphere = traj.states.front().v.grid();

  // pairs t < s spread over the window
  const std::size_t i0 = idx.front(), i1 = idx.back();
  c.constant = 0.0;
  c.pairs = 0;
  bool finite = true;
  for (int k = 0; k < pairs; ++k) {
    const std::size_t a = i0 + (i1 - i0) * k / (2 * pairs);
    const std::size_t b = i0 + (i1 - i0) * (k + pairs) / (2 * pairs);
    if (b <= a) continue;
    const Eigen::ArrayXd diff = traj.states[b].v.samples().array() - traj.states[a].v.samples().array();
    const double lhs = sphere.integral(diff.abs().pow(dim.two_star()).matrix());
    const double rhs = trapezoid(s, d, a, b);
    if (rhs > 0.0) {
      c.constant = std::max(c.constant, lhs / rhs);
    } else if (lhs > 0.0) {
      finite = false;
    }
    ++c.pairs;
  }

  // unit blocks [k, k+1] inside the recorded range, with delta piecewise linear
  auto interp = [&](const std::vector<double>& y, double x) {
    auto it = std::upper_bound(s.begin(), s.end(), x);
    if (it == s.begin()) return y.front();
    if (it == s.end()) return y.back();
    const std::size_t j = static_cast<std::size_t>(it - s.begin());
    const double th = (x - s[j - 1]) / (s[j] - s[j - 1]);
    return (1.0 - th) * y[j - 1] + th * y[j];
  };
  c.blocks = 0;
  c.block_margin = std::numeric_limits<double>::infinity();
  c.blocks_ok = true;
  for (double k = std::ceil(s.front()); k + 1.0 <= s.back() + 1e-12; k += 1.0) {
    std::vector<double> bx{k}, by{interp(d, k)};
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s[j] > k && s[j] < k + 1.0) {
        bx.push_back(s[j]);
        by.push_back(d[j]);
      }
    bx.push_back(k + 1.0);
    by.push_back(interp(d, k + 1.0));
    std::vector<double> by2(by.size());
    for (std::size_t j = 0; j < by.size(); ++j) by2[j] = by[j] * by[j];
    const double i1d = trapezoid(bx, by, 0, bx.size() - 1);
    const double i2d = trapezoid(bx, by2, 0, bx.size() - 1);
    const double margin = i2d - i1d * i1d;
    c.block_margin = std::min(c.block_margin, margin);
    if (margin < -1e-14 * std::max(i2d, 1e-300)) c.blocks_ok = false;
    ++c.blocks;
  }
  if (c.blocks == 0) c.block_margin = 0.0;

  // integrated tail of delta
  std::vector<double> tail(s.size(), 0.0);
  for (std::size_t j = s.size() - 1; j-- > 0;) tail[j] = tail[j + 1] + 0.5 * (s[j + 1] - s[j]) * (d[j] + d[j + 1]);
  try {
    c.tail = fit_exponential(s, tail, s_a, s_a + 0.75 * (s_b - s_a));
    c.tail_ok = c.tail.rate > 0.0;
  } catch (const InvalidArgument& e) {
    c.tail_ok = false;
    c.reason = e.what();
  }
  c.pass = finite && std::isfinite(c.constant) && c.pairs > 0 && c.blocks_ok && c.tail_ok;
  if (!c.pass && c.reason.empty()) c.reason = !finite ? "unbounded Cauchy ratio" : "block or tail check failed";
  return c;
}

RateReport analyze(const Trajectory& traj, const RateOptions& opts) {
  RateReport rep;
  if (traj.classification != FlowClass::Converged) {
    rep.reason = "trajectory classified " + to_string(traj.classification);
    return rep;
  }
  if (traj.diagnostics.size() != traj.states.size()) {
    rep.reason = "trajectory has no diagnostics";
    return rep;
  }
  const auto& rows = traj.diagnostics;
  const Dimension dim = traj.states.front().v.dim();

  // noise level of rho_ratio implied by the rounding of I
  const DiagnosticsRow& r0 = rows.front();
  const double scale_J = 0.5 * r0.energy + dim.c_flow() * r0.mass / dim.two_star();
  const double noise_I = 100.0 * std::numeric_limits<double>::epsilon() * scale_J;
  rep.noise_ratio = std::sqrt(noise_I / r0.energy);
  const double end_ratio = opts.noise_factor * rep.noise_ratio;

  auto ratio = [&](std::size_t i) { return rows[i].rhoH1 / std::sqrt(rows[i].energy); };
  std::size_t a = rows.size();
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (ratio(i) < opts.start_ratio && ratio(i) > end_ratio && rows[i].I > 0.0) {
      a = i;
      break;
    }
  if (a == rows.size()) {
    rep.reason = ratio(0) <= end_ratio ? "stationary state: nothing to fit" : "no fit window";
    return rep;
  }
  std::size_t b = a;
  std::size_t best = a;
  for (std::size_t i = a + 1; i < rows.size(); ++i) {
    if (rows[i].I <= 0.0 || ratio(i) <= end_ratio) break;
    if (rows[i].rhoH1 < rows[best].rhoH1) best = i;
    b = i;
  }
  b = std::min(b, best);
  rep.s_a = rows[a].s;
  rep.s_b = rows[b].s;
  rep.samples = static_cast<int>(b - a + 1);
  if (rep.samples < opts.min_samples) {
    rep.reason = "fit window shorter than " + std::to_string(opts.min_samples) + " samples";
    return rep;
  }

  std::vector<double> s, I, rho2;
  for (const auto& r : rows) {
    s.push_back(r.s);
    I.push_back(r.I > 0.0 ? r.I : std::numeric_limits<double>::min());
    rho2.push_back(std::max(r.rhoH1 * r.rhoH1, std::numeric_limits<double>::min()));
  }
  rep.I_fit = fit_exponential(s, I, rep.s_a, rep.s_b);
  rep.rho_fit = fit_exponential(s, rho2, rep.s_a, rep.s_b);
  rep.kappaFit = rep.I_fit.rate;
  rep.kappaRho = rep.rho_fit.rate;
  rep.r2 = rep.I_fit.r2;
  const double mid = 0.5 * (rep.s_a + rep.s_b);
  try {
    rep.I_fit_half = fit_exponential(s, I, mid, rep.s_b);
    rep.half_window_change = std::abs(rep.I_fit_half.rate - rep.kappaFit) / rep.kappaFit;
  } catch (const InvalidArgument&) {
    rep.half_window_change = std::numeric_limits<double>::infinity();
  }

  rep.ratio_min = std::numeric_limits<double>::infinity();
  rep.ratio_max = 0.0;
  rep.mass_min = std::numeric_limits<double>::infinity();
  rep.mass_max = 0.0;
  double c_k0 = 0.0, c_prof = 0.0;
  for (std::size_t i = a; i <= b; ++i) {
    const double q = rows[i].I / (rows[i].rhoH1 * rows[i].rhoH1);
    rep.ratio_min = std::min(rep.ratio_min, q);
    rep.ratio_max = std::max(rep.ratio_max, q);
    rep.mass_min = std::min(rep.mass_min, rows[i].mass);
    rep.mass_max = std::max(rep.mass_max, rows[i].mass);
    const double dk = rows[i].K0 - dim.c_flow();
    const double djds = rows[i].dissipation / dim.p();
    if (djds > 0.0) c_k0 = std::max(c_k0, dk * dk / djds);
  }
  rep.ratio_ok = rep.ratio_min >= 1.0 / opts.ratio_band && rep.ratio_max <= opts.ratio_band;
  rep.C_K0 = c_k0;

  rep.delta_bound_ok = true;
  for (const auto& r : rows)
    if (r.delta * r.delta > r.delta_bound_rhs * (1.0 + 1e-9) + 1e-28) rep.delta_bound_ok = false;

  // weighted sup residual on up to 200 states of the window
  const std::size_t stride = std::max<std::size_t>(1, (b - a) / 200);
  for (std::size_t i = a; i <= b; i += stride) {
    const RenormalizedProfile rp = renormalized_profile(traj.states[i].v);
    rep.theta_s.push_back(rows[i].s);
    rep.theta_sup.push_back(weighted_sup_residual(traj.states[i].v, rp));
    const double dk = rows[i].K0 - dim.c_flow();
    const double denom = rows[i].delta * rows[i].delta + dk * dk;
    if (denom > 0.0) c_prof = std::max(c_prof, rp.distance * rp.distance / denom);
  }
  rep.C_profile = c_prof;
  rep.thetaSup = rep.theta_sup.back();
  try {
    rep.theta_fit = fit_exponential(rep.theta_s, rep.theta_sup, rep.s_a, rep.s_b);
  } catch (const InvalidArgument&) {
  }
  rep.theta_ripple = 0.0;
  for (std::size_t k = rep.theta_s.size() / 2 + 1; k < rep.theta_s.size(); ++k)
    rep.theta_ripple = std::max(rep.theta_ripple, rep.theta_sup[k] / rep.theta_sup[k - 1] - 1.0);
  rep.theta_monotone = rep.theta_ripple <= 0.05;

  rep.cauchy = cauchy_tail_check(traj, rep.s_a, rep.s_b);

  const NearestStationary fin = nearest_stationary(traj.states[b].v);
  rep.final_lambda = fin.lambda;
  rep.orth_max = std::max({std::abs(fin.orth_gradient), std::abs(fin.orth_power), std::abs(fin.orth_lambda)});
  std::vector<double> l2;
  for (const auto& st : traj.states) {
    const Eigen::ArrayXd diff = st.v.samples().array() - fin.W.samples().array();
    l2.push_back(std::max(st.v.grid().integral(diff.abs().pow(dim.two_star()).matrix()),
                          std::numeric_limits<double>::min()));
  }
  try {
    rep.l2star_fit = fit_exponential(s, l2, rep.s_a, rep.s_a + 0.75 * (rep.s_b - rep.s_a));
  } catch (const InvalidArgument&) {
  }
  rep.applicable = true;
  return rep;
}

}  // namespace bubblelab
