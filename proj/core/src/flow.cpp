#include "bubblelab/flow.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <future>

#include "bubblelab/rate.hpp"

namespace bubblelab {

std::string to_string(Representation r) {
  return r == Representation::PlaneRadial ? "plane-radial" : "sphere-zonal";
}

std::string to_string(FlowClass c) {
  switch (c) {
    case FlowClass::Running: return "Running";
    case FlowClass::Converged: return "Converged";
    case FlowClass::Vanished: return "Vanished";
    case FlowClass::BlewUp: return "BlewUp";
    case FlowClass::Aborted: return "Aborted";
  }
  return "?";
}

Representation representation_from_string(const std::string& s) {
  if (s == "plane-radial") return Representation::PlaneRadial;
  if (s == "sphere-zonal") return Representation::SphereZonal;
  throw InvalidArgument("unknown representation '" + s + "'");
}

void FlowConfig::validate() const {
  if (n < 3) throw InvalidArgument("FlowConfig: n must be >= 3");
  if (sphere_nodes < 4) throw InvalidArgument("FlowConfig: sphere_nodes must be >= 4");
  if (!(ds0 > 0.0)) throw InvalidArgument("FlowConfig: ds0 must be positive");
  if (!(ds_max >= ds0)) throw InvalidArgument("FlowConfig: ds_max must be >= ds0");
  if (!(s_end > 0.0)) throw InvalidArgument("FlowConfig: s_end must be positive");
  if (!(floor_rel > 0.0 && floor_rel <= 1e-12)) throw InvalidArgument("FlowConfig: floor must lie in (0, 1e-12]");
  if (!(step_tol > 0.0) || !(newton_tol > 0.0)) throw InvalidArgument("FlowConfig: tolerances must be positive");
  if (!(mass_low > 0.0 && mass_low < 1.0 && mass_high > 1.0)) throw InvalidArgument("FlowConfig: bad mass thresholds");
  if (!(initial.amplitude > 0.0)) throw InvalidArgument("FlowConfig: amplitude must be positive");
  if (initial.degree < 0) throw InvalidArgument("FlowConfig: perturbation degree must be >= 0");
  if (calibration.enabled && !(calibration.lo > 0.0 && calibration.hi > calibration.lo && calibration.tol > 0.0))
    throw InvalidArgument("FlowConfig: bad calibration bracket");
}

std::shared_ptr<const SphereGrid> flow_sphere_grid(const FlowConfig& config) {
  return SphereGrid::make(Dimension(config.n), config.sphere_nodes);
}

ZonalSphereField initial_data(const FlowConfig& config, std::shared_ptr<const SphereGrid> sphere) {
  const Dimension dim = sphere->dim();
  const FlowScenario& sc = config.initial;
  Eigen::VectorXd v;
  if (sc.sphere) {
    if (!sc.sphere->grid().same_as(*sphere)) throw GridMismatch("initial_data: sphere grid differs from the flow grid");
    v = sc.sphere->samples();
  } else if (sc.plane) {
    v = plane_to_sphere(*sc.plane, sphere).samples();
  } else {
    const double c = stationary_constant(dim);
    std::vector<double> pk(sc.degree + 1);
    v.resize(sphere->size());
    for (int j = 0; j < sphere->size(); ++j) {
      zonal_polynomials(dim.n() + 1, sc.degree, sphere->t()(j), pk.data());
      v(j) = c * (1.0 + sc.epsilon * pk[sc.degree]);
    }
  }
  ZonalSphereField out(std::move(sphere), sc.amplitude * v);
  out.require_positive("initial_data");
  return out;
}

std::optional<ZonalSphereField> implicit_euler_step(const ZonalSphereField& v0, double ds, const StepOptions& opts,
                                                    int* iterations) {
  const Dimension& dim = v0.dim();
  const double p = dim.p(), c = dim.sphere_shift(), cf = dim.c_flow();
  const Eigen::MatrixXd& L = v0.grid().laplacian();
  const Eigen::ArrayXd psi0 = v0.samples().array().pow(p);
  const double scale = psi0.abs().maxCoeff();

  auto residual = [&](const Eigen::ArrayXd& v) -> Eigen::ArrayXd {
    const Eigen::ArrayXd vp = v.pow(p);
    const Eigen::ArrayXd lv = (L * v.matrix()).array();
    return vp - psi0 - ds * (lv - c * v + cf * vp);
  };

  Eigen::ArrayXd v = v0.samples().array();
  Eigen::ArrayXd r = residual(v);
  double rn = r.abs().maxCoeff();
  int it = 0;
  for (; it < opts.newton_max_iterations && rn > opts.newton_tol * scale; ++it) {
    Eigen::MatrixXd jac = -ds * L;
    jac.diagonal().array() += p * v.pow(p - 1.0) * (1.0 - ds * cf) + ds * c;
    const Eigen::VectorXd dv = jac.partialPivLu().solve(-r.matrix());
    double theta = 1.0;
    bool improved = false;
    for (int h = 0; h < 30; ++h, theta *= 0.5) {
      const Eigen::ArrayXd trial = v + theta * dv.array();
      if ((trial <= 0.0).any() || !trial.allFinite()) continue;
      const Eigen::ArrayXd rt = residual(trial);
      const double rtn = rt.abs().maxCoeff();
      if (rtn < rn) {
        v = trial;
        r = rt;
        rn = rtn;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (iterations) *iterations = it;
  if (!(rn <= opts.newton_tol * scale)) return std::nullopt;
  return ZonalSphereField(v0.grid_ptr(), v.matrix());
}

FlowState step(const FlowState& state, double ds, const StepOptions& opts) {
  FlowState out{state.s, state.v, ds, false, 0, 0.0};
  int i1 = 0, i2 = 0, i3 = 0;
  const auto full = implicit_euler_step(state.v, ds, opts, &i1);
  if (!full) return out;
  const auto half1 = implicit_euler_step(state.v, 0.5 * ds, opts, &i2);
  if (!half1) return out;
  const auto half2 = implicit_euler_step(*half1, 0.5 * ds, opts, &i3);
  if (!half2) return out;
  const double p = state.v.dim().p();
  const Eigen::ArrayXd pf = full->samples().array().pow(p);
  const Eigen::ArrayXd ph = half2->samples().array().pow(p);
  const Eigen::ArrayXd pe = 2.0 * ph - pf;
  out.newton_iterations = i1 + i2 + i3;
  out.error_estimate = (ph - pf).abs().maxCoeff() / ph.abs().maxCoeff();
  if ((pe <= 0.0).any()) return out;
  out.v = ZonalSphereField(state.v.grid_ptr(), pe.pow(1.0 / p).matrix());
  out.s = state.s + ds;
  out.accepted = true;
  return out;
}

DiagnosticsRow diagnostics_row(const FlowState& state, double j_reference) {
  const ZonalSphereField& v = state.v;
  const Dimension& dim = v.dim();
  DiagnosticsRow row;
  row.s = state.s;
  row.dt_accepted = state.ds;
  row.energy = conformal_energy(v);
  row.mass = mass(v);
  row.K0 = row.energy / row.mass;
  row.J = 0.5 * row.energy - dim.c_flow() * row.mass / dim.two_star();
  row.I = row.J - j_reference;
  row.delta = deficit(v);
  row.dissipation = dissipation(v);
  row.delta_bound_rhs = delta_bound_rhs(v);
  row.alpha = std::pow((1.0 - dim.m()) * row.K0, 1.0 / (dim.p() - 1.0));
  const NearestStationary ns = nearest_stationary(v);
  row.rhoH1 = ns.rho_h1;
  row.lambda = ns.lambda;
  row.z = 0.0;
  return row;
}

namespace {

// Fixed stepping: on a failed solve, cover [s, s+h] with halved substeps.
FlowState substep(const FlowState& cur, double h, const StepOptions& opts) {
  FlowState first = step(cur, h, opts);
  if (first.accepted) return first;
  FlowState sub = cur;
  const double target = cur.s + h;
  double hs = 0.5 * h;
  while (target - sub.s > 1e-14 * std::max(1.0, target)) {
    FlowState t = step(sub, std::min(hs, target - sub.s), opts);
    if (!t.accepted) {
      hs *= 0.5;
      if (hs < 1e-12) return first;
      continue;
    }
    sub = t;
  }
  sub.s = target;
  sub.ds = h;
  return sub;
}

double stationary_mass(const Dimension& dim) {
  const double c = stationary_constant(dim);
  return std::pow(c, dim.two_star()) * Dimension::sphere_area(dim.n());
}

}  // namespace

Trajectory run(const FlowConfig& config) {
  config.validate();
  const Dimension dim = config.dim();
  auto sphere = flow_sphere_grid(config);
  Trajectory traj;
  traj.config = config;
  traj.j_reference = stationary_energy(dim);
  traj.stationary_mass = stationary_mass(dim);

  FlowState cur{0.0, initial_data(config, sphere), 0.0, true, 0, 0.0};
  const double p = dim.p();
  const double floor = config.floor_rel * cur.v.samples().array().pow(p).maxCoeff();
  traj.initial_mass = mass(cur.v);
  const StepOptions sopts{config.newton_tol, config.newton_max_iterations};

  auto record = [&](const FlowState& st) {
    traj.states.push_back(st);
    if (config.diagnostics) traj.diagnostics.push_back(diagnostics_row(st, traj.j_reference));
  };
  record(cur);
  traj.step_s.push_back(0.0);
  traj.step_J.push_back(flow_energy_J(cur.v));
  traj.residence = config.s_end;
  bool left_band = false;

  double ds = config.ds0;
  double next_output = config.output_interval;
  while (traj.classification == FlowClass::Running) {
    const double remaining = config.s_end - cur.s;
    if (remaining <= 1e-12 * config.s_end) break;
    double h = std::min(ds, remaining);
    if (!config.adaptive) h = std::min(config.ds0, remaining);
    FlowState nxt = config.adaptive ? step(cur, h, sopts) : substep(cur, h, sopts);
    if (!nxt.accepted || (config.adaptive && nxt.error_estimate > config.step_tol)) {
      ++traj.rejected_steps;
      ds = nxt.accepted ? h * std::max(0.2, 0.9 * std::sqrt(config.step_tol / nxt.error_estimate)) : 0.5 * h;
      if (!config.adaptive || ds < 1e-12) {
        traj.classification = FlowClass::Aborted;
        traj.message = "step underflow at s = " + std::to_string(cur.s);
        break;
      }
      continue;
    }
    const bool touched_floor = nxt.v.samples().array().pow(p).minCoeff() <= floor;
    cur = nxt;
    ++traj.accepted_steps;
    traj.step_s.push_back(cur.s);
    traj.step_J.push_back(flow_energy_J(cur.v));
    if (config.adaptive) {
      const double grow = cur.error_estimate > 0.0 ? 0.9 * std::sqrt(config.step_tol / cur.error_estimate) : 2.0;
      ds = std::min(config.ds_max, h * std::clamp(grow, 0.2, 2.0));
    }

    const double m = mass(cur.v);
    if (!left_band && std::abs(m / traj.stationary_mass - 1.0) > 1e-2) {
      left_band = true;
      traj.residence = cur.s;
    }
    const bool at_end = config.s_end - cur.s <= 1e-12 * config.s_end;
    if (touched_floor || m < config.mass_low * traj.initial_mass) {
      traj.classification = FlowClass::Vanished;
    } else if (m > config.mass_high * traj.initial_mass) {
      traj.classification = FlowClass::BlewUp;
    }
    if (traj.classification != FlowClass::Running || at_end || cur.s >= next_output - 1e-12) {
      record(cur);
      if (config.output_interval > 0.0) {
        while (next_output <= cur.s + 1e-12) next_output += config.output_interval;
      }
    }
  }

  const double m_end = mass(traj.last().v);
  traj.lean = m_end > traj.stationary_mass ? 1.0 : (m_end < traj.stationary_mass ? -1.0 : 0.0);
  if (traj.classification == FlowClass::Running) {
    if (std::abs(m_end / traj.stationary_mass - 1.0) <= config.converged_band) {
      traj.classification = FlowClass::Converged;
    } else {
      traj.classification = traj.lean > 0 ? FlowClass::BlewUp : FlowClass::Vanished;
    }
  }
  return traj;
}

int criticality_side(const Trajectory& t) {
  switch (t.classification) {
    case FlowClass::BlewUp: return 1;
    case FlowClass::Vanished: return -1;
    default: return t.lean > 0 ? 1 : -1;
  }
}

namespace {

Trajectory run_at(const FlowConfig& base, double amplitude, bool diagnostics) {
  FlowConfig cfg = base;
  cfg.initial.amplitude = base.initial.amplitude * amplitude;
  cfg.diagnostics = diagnostics;
  cfg.calibration.enabled = false;
  return run(cfg);
}

}  // namespace

CalibrationResult calibrate_amplitude(const FlowConfig& config) {
  config.validate();
  const CalibrationConfig& cc = config.calibration;
  double lo = cc.lo, hi = cc.hi;
  Trajectory tlo = run_at(config, lo, false);
  Trajectory thi = run_at(config, hi, false);
  if (tlo.classification == FlowClass::Aborted || thi.classification == FlowClass::Aborted ||
      criticality_side(tlo) >= 0 || criticality_side(thi) <= 0) {
    throw Unresolved("calibrate_amplitude: no bracket found in [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "] (" + to_string(tlo.classification) + ", " +
                     to_string(thi.classification) + ")");
  }
  CalibrationResult res;
  int it = 0;
  while (hi - lo > cc.tol * 0.5 * (hi + lo) && it < cc.max_iterations) {
    const double mid = 0.5 * (lo + hi);
    Trajectory t = run_at(config, mid, false);
    if (t.classification == FlowClass::Aborted) throw Unresolved("calibrate_amplitude: run aborted: " + t.message);
    if (criticality_side(t) > 0) {
      hi = mid;
      thi = std::move(t);
    } else {
      lo = mid;
      tlo = std::move(t);
    }
    ++it;
  }
  res.lo = lo;
  res.hi = hi;
  res.iterations = it;
  res.critical_amplitude = 0.5 * (lo + hi);
  const double best = tlo.residence >= thi.residence ? lo : hi;
  res.trajectory = run_at(config, best, config.diagnostics);
  res.trajectory.config.initial.amplitude = config.initial.amplitude * best;
  return res;
}

AmplitudeScan amplitude_scan(const FlowConfig& config, double lo, double hi, int points) {
  if (points < 2 || !(hi > lo && lo > 0.0)) throw InvalidArgument("amplitude_scan: bad range");
  AmplitudeScan scan;
  std::vector<std::future<int>> jobs;
  for (int i = 0; i < points; ++i) {
    const double a = lo + (hi - lo) * i / (points - 1);
    scan.amplitudes.push_back(a);
    jobs.push_back(std::async(std::launch::async, [&config, a] {
      return criticality_side(run_at(config, a, false));
    }));
  }
  for (auto& j : jobs) scan.sides.push_back(j.get());
  for (int i = 1; i < points; ++i) scan.flips += scan.sides[i] != scan.sides[i - 1];
  scan.monotone = scan.flips == 1 && scan.sides.front() < 0 && scan.sides.back() > 0;
  return scan;
}

}  // namespace bubblelab
