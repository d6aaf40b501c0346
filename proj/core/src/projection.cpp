#include "bubblelab/projection.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "bubblelab/bubble.hpp"
#include "bubblelab/functionals.hpp"
#include "bubblelab/least_squares.hpp"

namespace bubblelab {

namespace {

// Inner products in the Dirichlet form, evaluated as \int f (-Delta X) with
// the analytic -Delta of the bubble and its parameter derivatives:
//   -Delta v = v^p, -Delta V = p v^{p-1} V, -Delta W = p v^{p-1} W.
class FitContext {
 public:
  FitContext(const ModalField& u, double energy) : u_(u), energy_(energy) {}

  GaussNewtonModel model(const Eigen::VectorXd& x, double max_log_scale, Eigen::Vector3d* ortho = nullptr) {
    GaussNewtonModel m;
    if (!x.allFinite() || std::abs(x(2)) > max_log_scale || std::abs(x(0)) > 50.0 ||
        std::abs(x(1)) > 1e6) {
      m.valid = false;
      return m;
    }
    const Dimension& dim = u_.dim();
    const double amp = std::exp(x(0)), z = x(1), mu = std::exp(x(2));
    ensure_rule(mu, z);
    const double n = dim.n(), a = 0.5 * (n - 2.0), p = dim.p();
    const double cc = bubble_constant(dim, 1.0) * std::pow(mu, a);
    const double cp1 = std::pow(cc, p - 1.0);  // v^{p-1} = cp1 q^{-2}
    const auto& r = u_.grid().r();
    const auto& t = rule_->t();
    // q^{-a} for a = (n-2)/2, avoiding pow for the common small dimensions
    auto qpow = [a](double q) {
      if (a == 0.5) return 1.0 / std::sqrt(q);
      if (a == 1.0) return 1.0 / q;
      if (a == 1.5) return 1.0 / (q * std::sqrt(q));
      if (a == 2.0) return 1.0 / (q * q);
      return std::pow(q, -a);
    };

    double g = 0.0, svv = 0.0;
    Eigen::Vector3d ux = Eigen::Vector3d::Zero();
    Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
    for (Eigen::Index j = 0; j < t.size(); ++j) {
      for (Eigen::Index i = 0; i < r.size(); ++i) {
        const double w = wt_(i, j);
        if (w == 0.0) continue;
        const double ri = r(i), tj = t(j);
        const double q = 1.0 + mu * mu * std::max(0.0, ri * ri - 2.0 * ri * tj * z + z * z);
        const double qa = qpow(q);
        const double v = cc * qa;
        const double vp1 = cp1 / (q * q);
        const double vp = v * vp1;
        const double x1 = amp * 2.0 * a * cc * mu * mu * (ri * tj - z) * qa / q;
        const double x2 = amp * mu * (a / mu) * cc * (2.0 - q) * qa / q;
        const double uu = uval_(i, j);
        g += w * uu * vp;
        svv += w * v * vp;
        ux(1) += w * uu * p * vp1 * x1;
        ux(2) += w * uu * p * vp1 * x2;
        gram(0, 1) += w * x1 * amp * vp;
        gram(0, 2) += w * x2 * amp * vp;
        gram(1, 1) += w * p * vp1 * x1 * x1;
        gram(1, 2) += w * p * vp1 * x1 * x2;
        gram(2, 2) += w * p * vp1 * x2 * x2;
      }
    }
    ux(0) = amp * g;
    gram(0, 0) = amp * amp * svv;
    gram(1, 0) = gram(0, 1);
    gram(2, 0) = gram(0, 2);
    gram(2, 1) = gram(1, 2);
    // <grad X_k, grad (u - amp v)> = <grad u, grad X_k> - <grad X_k, grad X_0>
    const Eigen::Vector3d b = ux - gram.col(0);
    m.cost = 0.5 * (energy_ - 2.0 * amp * g + amp * amp * svv);
    m.gradient = -b;
    m.normal = gram;
    m.cost_noise = 1e-14 * energy_;
    m.valid = std::isfinite(m.cost) && b.allFinite();
    if (ortho) {
      for (int k = 0; k < 3; ++k) {
        const double xn = std::sqrt(gram(k, k));
        (*ortho)(k) = xn > 0.0 ? b(k) / (xn * std::sqrt(energy_)) : 0.0;
      }
    }
    return m;
  }

 private:
  void ensure_rule(double mu, double z) {
    const double need_d = std::min(4096.0, 48.0 * mu * std::abs(z) + 32.0);
    const int need = std::max(u_.lmax() + 32, static_cast<int>(std::ceil(need_d)));
    if (rule_ && rule_->size() >= need) return;
    const int m = std::max(need, rule_ ? 2 * rule_->size() : 0);
    rule_ = std::make_shared<const AngularRule>(u_.dim(), u_.lmax(), std::min(m, 4096));
    uval_ = u_.synthesize(*rule_).u;
    wt_ = u_.grid().weights() * rule_->weights().transpose();
  }

  const ModalField& u_;
  double energy_;
  std::shared_ptr<const AngularRule> rule_;
  Eigen::MatrixXd uval_, wt_;
};

struct Start {
  double log_amp, z, log_scale;
};

struct AxisPeak {
  double x = 0.0, value = 0.0, half_width = 1.0;
};

// Peak of u along the axis on one side (sign = +1 or -1) and its half-height radius.
AxisPeak axis_peak(const ModalField& u, double sign) {
  const RadialGrid& g = u.grid();
  std::vector<double> xs, vs;
  for (int i = g.size() - 1; i >= 0; --i) {
    xs.push_back(-g.r()(i));
    vs.push_back(u.value_at_node(i, -1.0));
  }
  for (int i = 0; i < g.size(); ++i) {
    xs.push_back(g.r()(i));
    vs.push_back(u.value_at_node(i, 1.0));
  }
  const std::size_t half = static_cast<std::size_t>(g.size());
  std::size_t lo = sign > 0 ? half : 0, hi = sign > 0 ? xs.size() : half;
  std::size_t k = lo;
  for (std::size_t i = lo; i < hi; ++i) {
    if (vs[i] > vs[k]) k = i;
  }
  AxisPeak pk{xs[k], vs[k], 1.0};
  const double target = 0.5 * vs[k];
  double widths = 0.0;
  int count = 0;
  for (int dir : {-1, 1}) {
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(k);
         i + dir >= 0 && i + dir < static_cast<std::ptrdiff_t>(xs.size()); i += dir) {
      if (vs[i + dir] <= target) {
        const double f = (vs[i] - target) / (vs[i] - vs[i + dir]);
        widths += std::abs(xs[i] + f * (xs[i + dir] - xs[i]) - xs[k]);
        ++count;
        break;
      }
    }
  }
  if (count > 0 && widths > 0.0) pk.half_width = widths / count;
  return pk;
}

std::vector<Start> initial_guesses(const ModalField& u, double energy, int max_starts) {
  const Dimension& dim = u.dim();
  const double a = 0.5 * (dim.n() - 2.0);
  const double sn = sobolev_power(dim);
  const double c1 = bubble_constant(dim, 1.0);

  const auto rule = integration_rule(dim, u.lmax());
  const Eigen::MatrixXd uu = u.synthesize(*rule).u;
  double num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < uu.cols(); ++j) {
    for (Eigen::Index i = 0; i < uu.rows(); ++i) {
      const double w = u.grid().weights()(i) * rule->weights()(j) * std::pow(std::abs(uu(i, j)), dim.two_star());
      num += w * u.grid().r()(i) * rule->t()(j);
      den += w;
    }
  }
  const double zbar = den > 0.0 ? num / den : 0.0;
  const double log_amp = 0.5 * std::log(std::max(energy, 1e-300) / sn);

  const AxisPeak plus = axis_peak(u, 1.0), minus = axis_peak(u, -1.0);
  const AxisPeak& top = plus.value >= minus.value ? plus : minus;
  const double hh = std::sqrt(std::pow(2.0, 1.0 / a) - 1.0);
  const double lam = hh / top.half_width;

  std::vector<Start> starts;
  auto add = [&](double la, double z, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda) || !std::isfinite(la)) return;
    for (const auto& s : starts) {
      if (std::abs(s.z - z) < 1e-12 && std::abs(s.log_scale - std::log(lambda)) < 1e-12 &&
          std::abs(s.log_amp - la) < 1e-12)
        return;
    }
    starts.push_back({la, z, std::log(lambda)});
  };
  add(log_amp, zbar, lam);
  for (double f : {2.0, 0.5, 4.0, 0.25}) add(log_amp, zbar, f * lam);
  for (const AxisPeak* pk : {&plus, &minus}) {
    const double lp = hh / pk->half_width;
    const double amp = pk->value / (c1 * std::pow(lp, a));
    if (amp > 0.0) add(std::log(amp), pk->x, lp);
  }
  add(log_amp, 0.0, 1.0);
  if (static_cast<int>(starts.size()) > max_starts) starts.resize(std::max(1, max_starts));
  return starts;
}

struct StartOutcome {
  LeastSquaresResult ls;
  Eigen::Vector3d ortho = Eigen::Vector3d::Zero();
  bool admissible = false;
};

}  // namespace

ProjectionResult project_to_bubble(const ModalField& u, const ProjectionOptions& opts) {
  const Dimension& dim = u.dim();
  const double energy = dirichlet(u);
  if (!(energy > 0.0) || !std::isfinite(energy)) throw InvalidArgument("project_to_bubble: u must have positive finite energy");
  const std::vector<Start> starts = initial_guesses(u, energy, opts.max_starts);

  LeastSquaresOptions ls;
  ls.gradient_tol = opts.gradient_tol * energy;
  ls.max_iterations = 200;

  auto run = [&](const Start& s) {
    FitContext ctx(u, energy);
    ModelFunction f = [&](const Eigen::VectorXd& x) { return ctx.model(x, opts.max_abs_log_scale); };
    Eigen::VectorXd x0(3);
    x0 << s.log_amp, s.z, s.log_scale;
    StartOutcome out;
    out.ls = levenberg_marquardt(f, x0, ls);
    if (out.ls.x.size() == 3) {
      Eigen::Vector3d o;
      GaussNewtonModel m = ctx.model(out.ls.x, opts.max_abs_log_scale, &o);
      out.admissible = m.valid;
      out.ortho = o;
    }
    return out;
  };

  std::vector<StartOutcome> outcomes(starts.size());
  if (opts.parallel && starts.size() > 1) {
    std::vector<std::future<StartOutcome>> futs;
    for (const auto& s : starts) futs.push_back(std::async(std::launch::async, run, s));
    for (std::size_t i = 0; i < futs.size(); ++i) outcomes[i] = futs[i].get();
  } else {
    for (std::size_t i = 0; i < starts.size(); ++i) outcomes[i] = run(starts[i]);
  }

  // ordered reduction: converged first, then cost, then |log lambda|
  int best = -1, converged_count = 0;
  const double tie = 1e-12 * energy;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (!o.admissible) continue;
    if (o.ls.converged) ++converged_count;
    if (best < 0) {
      best = static_cast<int>(i);
      continue;
    }
    const auto& b = outcomes[best];
    if (o.ls.converged != b.ls.converged) {
      if (o.ls.converged) best = static_cast<int>(i);
      continue;
    }
    if (o.ls.cost < b.ls.cost - tie ||
        (std::abs(o.ls.cost - b.ls.cost) <= tie && std::abs(o.ls.x(2)) < std::abs(b.ls.x(2)) - 1e-8)) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw Unresolved("project_to_bubble: no admissible start");
  const StartOutcome& bo = outcomes[best];

  BubbleParams params = BubbleParams::on_axis(dim, 0.0, 1.0, std::exp(bo.ls.x(2)), std::exp(bo.ls.x(0)));
  for (int k = 0; k < dim.n(); ++k) params.center[k] = bo.ls.x(1) * u.axis()[k];
  ModalField fitted = eval_bubble(u.grid_ptr(), params, 1e-10, u.axis());
  ModalField rho = u - fitted;

  ProjectionResult res{
      .params = params,
      .axial_center = bo.ls.x(1),
      .rho = rho,
      .status = {},
  };
  res.rhoH1 = std::sqrt(std::max(0.0, dirichlet(rho)));
  res.rhoH1_physical = std::sqrt(std::max(0.0, dirichlet_physical(rho)));
  for (int k = 0; k < 3; ++k) res.ortho_residuals[k] = bo.ortho(k);
  res.dirichlet_u = energy;
  res.objective = res.rhoH1 * res.rhoH1;
  res.converged = bo.ls.converged;
  res.multistart = static_cast<int>(starts.size());
  res.converged_starts = converged_count;
  res.guard_warning = res.rhoH1 > 0.2 * std::sqrt(energy);
  if (res.converged) {
    res.status = "converged";
  } else if (std::abs(bo.ls.x(2)) > 0.9 * opts.max_abs_log_scale) {
    res.status = "concentration/flattening: scale escaping";
  } else {
    res.status = "no converged start: " + bo.ls.status;
  }
  if (opts.compute_delta) {
    res.delta = deficit(u, opts.K);
    res.ratio = res.delta > 0.0 ? res.rhoH1 / res.delta : std::numeric_limits<double>::infinity();
  }
  return res;
}

double normalization_factor(const ModalField& u) {
  const Dimension& dim = u.dim();
  return std::pow(k0(u), 1.0 / (dim.two_star() - 2.0));
}

ModalField normalize_k0(const ModalField& u) { return normalization_factor(u) * u; }

StabilityReport stability_check(const ModalField& u, const StabilityOptions& opts) {
  const Dimension& dim = u.dim();
  StabilityReport rep;
  rep.K0_input = k0(u);
  rep.normalization = std::pow(rep.K0_input, 1.0 / (dim.two_star() - 2.0));
  const ModalField un = rep.normalization * u;
  const double energy = dirichlet(un);
  const double kn = energy / mass(un);
  rep.energy_ratio = energy / sobolev_power(dim);
  rep.K0_ok = std::abs(kn - 1.0) <= 1e-10;
  rep.energy_ok = rep.energy_ratio <= 1.5;
  if (!rep.K0_ok || !rep.energy_ok) {
    rep.skipped = true;
    rep.reason = !rep.energy_ok ? "energy hypothesis violated: \\int |grad u|^2 > 3/2 S^n"
                                : "K0 normalisation failed";
    return rep;
  }
  ProjectionOptions po = opts.projection;
  // -Delta (c u) = c^{1-p} K (c u)^p
  const double kscale = std::pow(rep.normalization, 1.0 - dim.p());
  ModalField k_scaled =
      opts.projection.K ? kscale * *opts.projection.K : ModalField::zero(u.grid_ptr(), 0, u.axis());
  po.K = opts.projection.K ? &k_scaled : nullptr;
  ProjectionResult pr = project_to_bubble(un, po);
  rep.delta = pr.delta;
  rep.alpha_minus_one = pr.params.amplitude - 1.0;
  BubbleParams unit = pr.params;
  unit.amplitude = 1.0;
  const ModalField big_u = eval_bubble(u.grid_ptr(), unit, 1e-10, u.axis());
  const ModalField rho_prime = pr.rho + rep.alpha_minus_one * big_u;
  rep.rho_prime_h1 = std::sqrt(std::max(0.0, dirichlet(rho_prime)));
  if (rep.delta > opts.zero_delta) {
    rep.C_ratio = rep.rho_prime_h1 / rep.delta;
    rep.alpha_K = std::abs(rep.alpha_minus_one) / (rep.delta * rep.delta);
  }
  rep.projection = std::move(pr);
  return rep;
}

}  // namespace bubblelab
