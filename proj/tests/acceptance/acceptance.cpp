// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "bubblelab/bubble.hpp"
#include "bubblelab/conformal.hpp"
#include "bubblelab/flow.hpp"
#include "bubblelab/functionals.hpp"
#include "bubblelab/io.hpp"
#include "bubblelab/projection.hpp"
#include "bubblelab/rate.hpp"
#include "bubblelab/spectral.hpp"

using namespace bubblelab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = limit_s <= 0.0 || secs < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("[%s] %d %s: %s; %.2fs", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  if (limit_s > 0.0) std::printf(" (limit %.0fs)", limit_s);
  std::printf("\n");
  std::fflush(stdout);
}

double lambda_closed(int n) { return (n + 2.0) * (n + 4.0) / (n * (n - 2.0)); }

Outcome bubble_identities_check() {
  double worst = 0.0;
  for (int n : {3, 4, 5}) {
    const Dimension d(n);
    auto grid = RadialGrid::make(d);
    const double sn = std::pow(bubble_identities(d, 1.0, *grid).s_est, n);
    for (double kappa : {1.0, d.c_flow(), 2.0}) {
      const BubbleIdentities id = bubble_identities(d, kappa, *grid);
      worst = std::max(worst, std::abs(id.dirichlet / (sn * std::pow(kappa, -(n - 2) / 2.0)) - 1.0));
      worst = std::max(worst, std::abs(id.mass / (sn * std::pow(kappa, -n / 2.0)) - 1.0));
    }
  }
  const Dimension d3(3);
  const double s3 = std::pow(bubble_identities(d3, 1.0, *RadialGrid::make(d3)).s_est, 3);
  const double closed = 0.75 * std::sqrt(3.0) * std::numbers::pi * std::numbers::pi;
  const double err3 = std::abs(s3 / closed - 1.0);
  return {worst <= 1e-8 && err3 <= 1e-8,
          "max rel err " + fmt("%.2e", worst) + ", S^3 rel err " + fmt("%.2e", err3) + " (tol 1e-8)"};
}

Outcome residual_check() {
  double worst = 0.0, min_order = 1e300, max_order = 0.0;
  bool halves = true;
  for (int n : {3, 4, 5}) {
    const Dimension d(n);
    for (double kappa : {1.0, d.c_flow(), 2.0}) {
      const RadialGrid base(d, GridSpec{});
      worst = std::max(worst, bubble_residual(d, kappa, RadialGrid(d, base.refined_spec())));
    }
    double prev = bubble_residual(d, 1.0, RadialGrid(d, GridSpec{1.0, 8, 8}));
    for (int panels : {16, 32}) {
      const double cur = bubble_residual(d, 1.0, RadialGrid(d, GridSpec{1.0, panels, 8}));
      const double order = std::log2(prev / cur);
      halves = halves && cur <= 0.5 * prev;
      min_order = std::min(min_order, order);
      max_order = std::max(max_order, order);
      prev = cur;
    }
  }
  // degree-7 panels: second derivatives converge at order 6
  const bool order_ok = min_order > 5.0 && max_order < 7.5;
  return {worst <= 1e-8 && halves && order_ok, "refined residual " + fmt("%.2e", worst) + " (tol 1e-8), order on 8-node panels " +
                                                   fmt("%.2f", min_order) + ".." + fmt("%.2f", max_order) + " (expected 6)"};
}

Outcome spectrum_check() {
  std::string detail;
  bool ok = true;
  for (int n : {3, 4, 5, 6}) {
    const Dimension d(n);
    const SpectrumResult r = weighted_spectrum(d, 2);
    const bool bands = r.bands.size() >= 3 && std::abs(r.bands[0].value - 1.0) < 1e-6 && r.bands[0].multiplicity == 1 &&
                       std::abs(r.bands[1].value - d.p()) < 1e-6 && r.bands[1].multiplicity == n + 1 &&
                       std::abs(r.bands[2].value - r.Lambda) < 1e-9;
    const bool closed = n > 4 || std::abs(r.Lambda - lambda_closed(n)) <= 1e-6;
    ok = ok && bands && closed && r.Lambda > d.p() && r.extrapolation_ok;
    detail += (detail.empty() ? "" : ", ") + std::string("n=") + std::to_string(n) + " Lambda " + fmt("%.9f", r.Lambda);
  }
  return {ok, detail + " (Lambda(3)=35/3, Lambda(4)=6 to 1e-6; Lambda > p)"};
}

Outcome rayleigh_check() {
  std::string detail;
  bool ok = true;
  for (int n : {3, 4}) {
    const Dimension d(n);
    auto grid = RadialGrid::make(d);
    const auto trials = random_trial_fields(grid, 100, 42);
    const RayleighReport r = rayleigh_gap_check(trials, unit_basis(grid));
    ok = ok && r.quotients.size() == 100 && r.min_quotient >= lambda_closed(n) - 1e-4;
    detail += (detail.empty() ? "" : ", ") + std::string("n=") + std::to_string(n) + " min quotient " +
              fmt("%.6f", r.min_quotient) + " >= " + fmt("%.6f", lambda_closed(n) - 1e-4);
  }
  return {ok, detail + " over 100 trials"};
}

Outcome perturbed_family_check() {
  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  std::vector<double> de, cr, ak;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const PerturbedBubble pb = make_perturbed_bubble(cap_profile(grid), eps);
    StabilityOptions o;
    o.projection.K = &pb.K;
    const StabilityReport r = stability_check(pb.u, o);
    if (!r.K0_ok || !r.energy_ok || !r.C_ratio || !r.alpha_K) return {false, "hypotheses or ratios unavailable"};
    de.push_back(r.delta / eps);
    cr.push_back(*r.C_ratio);
    ak.push_back(*r.alpha_K);
  }
  auto spread = [](const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
  };
  const bool ok = spread(de) < 1.5 && spread(cr) < 2.0 && spread(ak) < 2.0;
  return {ok, "delta/eps " + fmt("%.5f", de[0]) + "," + fmt("%.5f", de[1]) + "," + fmt("%.5f", de[2]) + " spread " +
                  fmt("%.4f", spread(de)) + " (<1.5); C_ratio " + fmt("%.5f", cr[0]) + ".." + fmt("%.5f", cr[2]) +
                  " spread " + fmt("%.4f", spread(cr)) + " (<2); |alpha-1|/delta^2 " + fmt("%.3e", ak[0]) + " spread " +
                  fmt("%.4f", spread(ak)) + " (<2)"};
}

Outcome two_bubble_check() {
  const Dimension d(3);
  const double sn = sobolev_power(d);
  const double floor = 0.5 * std::sqrt(sn);
  double prev = 1e300, min_rho = 1e300, min_energy = 1e300;
  bool decreasing = true;
  std::string deltas;
  for (double sep : {10.0, 20.0, 40.0}) {
    const auto params = two_bubble_params(d, sep);
    auto grid = RadialGrid::make(d, multibubble_grid_spec(params));
    const MultiBubble mb = make_multibubble(grid, params);
    const double delta = deficit(mb.u, &mb.K);
    decreasing = decreasing && delta < prev;
    prev = delta;
    ProjectionOptions o;
    o.K = &mb.K;
    o.compute_delta = false;
    min_rho = std::min(min_rho, project_to_bubble(mb.u, o).rhoH1);
    min_energy = std::min(min_energy, dirichlet(mb.u) / sn);
    deltas += (deltas.empty() ? "" : ",") + fmt("%.4f", delta);
  }
  const bool ok = decreasing && min_rho >= floor && min_energy > 1.5;
  return {ok, "delta " + deltas + " strictly decreasing; min rhoH1 " + fmt("%.4f", min_rho) + " >= 0.5 S^{3/2} = " +
                  fmt("%.4f", floor) + "; min energy/S^3 " + fmt("%.4f", min_energy) + " > 1.5"};
}

Outcome flow_structure_check(double amplitude) {
  FlowConfig c;
  c.initial.amplitude = amplitude;
  c.adaptive = false;
  c.ds0 = 1e-3;
  c.s_end = 5.0;
  const Trajectory t = run(c);
  double max_inc = -1e300;
  for (std::size_t k = 1; k < t.step_J.size(); ++k) max_inc = std::max(max_inc, t.step_J[k] - t.step_J[k - 1]);
  const double p = c.dim().p();
  double worst = 0.0, resolved_until = 0.0;
  int compared = 0;
  bool bound = true;
  for (std::size_t k = 0; k < t.diagnostics.size(); ++k) {
    const auto& b = t.diagnostics[k];
    bound = bound && b.delta * b.delta <= b.delta_bound_rhs * (1.0 + 1e-9);
    if (k == 0) continue;
    const auto& a = t.diagnostics[k - 1];
    // increments below 1e4 ulps of J are rounding noise
    if (std::abs(b.J - a.J) < 1e4 * std::numeric_limits<double>::epsilon() * std::abs(b.J)) continue;
    const double slope = (b.J - a.J) / (b.s - a.s);
    const double predicted = -0.5 * (a.dissipation + b.dissipation) / p;
    worst = std::max(worst, std::abs(slope - predicted) / std::abs(predicted));
    resolved_until = b.s;
    ++compared;
  }
  const bool ok = t.classification == FlowClass::Converged && max_inc <= 1e-10 && compared > 1000 && worst <= 1e-3 && bound;
  return {ok, to_string(t.classification) + " at s=" + fmt("%.1f", t.last().s) + ", " + std::to_string(t.accepted_steps) +
                  " steps; max J increment " + fmt("%.2e", max_inc) + " (tol 1e-10); dJ/ds rel err " + fmt("%.2e", worst) +
                  " (tol 1e-3) over " + std::to_string(compared) + " resolved steps up to s=" + fmt("%.2f", resolved_until) +
                  "; delta bound " + (bound ? "holds" : "violated")};
}

Outcome rate_check(const CalibrationResult& cal) {
  const RateReport r = analyze(cal.trajectory);
  if (!r.applicable) return {false, "analysis not applicable: " + r.reason};
  const bool a = r.r2 >= 0.99 && r.kappaFit > 0.0;
  const bool b = r.ratio_min >= 0.1 && r.ratio_max <= 10.0;
  const bool c = r.cauchy.pass && std::isfinite(r.cauchy.constant) && r.cauchy.blocks_ok && r.cauchy.tail_ok;
  const bool d = r.theta_fit.rate > 0.0 && r.theta_fit.r2 >= 0.99;
  return {a && b && c && d,
          "c*=" + fmt("%.12f", cal.critical_amplitude) + ", window [" + fmt("%.3f", r.s_a) + "," + fmt("%.3f", r.s_b) +
              "]; (a) kappaFit " + fmt("%.4f", r.kappaFit) + " r2 " + fmt("%.6f", r.r2) + "; (b) I/|grad rho|^2 in [" +
              fmt("%.4f", r.ratio_min) + "," + fmt("%.4f", r.ratio_max) + "]; (c) Cauchy C " + fmt("%.2e", r.cauchy.constant) +
              " blocks " + std::to_string(r.cauchy.blocks) + " tail rate " + fmt("%.3f", r.cauchy.tail.rate) +
              (c ? " ok" : " not ok") + "; (d) thetaSup rate " + fmt("%.4f", r.theta_fit.rate) + " r2 " +
              fmt("%.6f", r.theta_fit.r2)};
}

Outcome conformal_check() {
  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  auto sphere = SphereGrid::make(d, 64);
  const StereographicMap F(d);
  const std::vector<std::function<double(double, double)>> fields = {
      [&](double r, double) { return bubble_value(d, 1.0, 0.0, 0.7, 1.0, r, 1.0); },
      [&](double r, double) { return F.conformal_factor(r) * (1.0 + 0.3 * StereographicMap::sphere_coordinate(r)); },
      [&](double r, double) {
        const double t = StereographicMap::sphere_coordinate(r);
        return F.conformal_factor(r) * (0.5 + 0.2 * t * t - 0.1 * t * t * t);
      },
  };
  double mass_err = 0.0, energy_err = 0.0, trip = 0.0;
  for (const auto& f : fields) {
    const ModalField u = ModalField::sample(grid, 0, f);
    const ZonalSphereField v = plane_to_sphere(u, sphere);
    mass_err = std::max(mass_err, std::abs(mass(v) / mass(u) - 1.0));
    energy_err = std::max(energy_err, std::abs(conformal_energy(v) / dirichlet(u) - 1.0));
    const ModalField back = sphere_to_plane(v, grid);
    trip = std::max(trip, (back.profiles().col(0) - u.profiles().col(0)).cwiseAbs().maxCoeff() /
                              u.profiles().col(0).cwiseAbs().maxCoeff());
  }
  const ZonalSphereField c =
      plane_to_sphere(eval_bubble(grid, BubbleParams::centered(d, d.c_flow())), SphereGrid::make(d, 16));
  const double target = std::pow(3.0 / 5.0, 0.25);
  const double const_err = (c.samples().array() - target).abs().maxCoeff();
  const bool ok = mass_err <= 1e-8 && energy_err <= 1e-6 && trip <= 1e-8 && const_err <= 1e-10;
  return {ok, "mass " + fmt("%.1e", mass_err) + " (1e-8), energy " + fmt("%.1e", energy_err) + " (1e-6), round trip " +
                  fmt("%.1e", trip) + " (1e-8), constant " + fmt("%.14f", c.samples()(0)) + " err " + fmt("%.1e", const_err) +
                  " (1e-10)"};
}

Outcome determinism_check() {
  const auto dir = std::filesystem::temp_directory_path() / "bubblelab_acceptance";
  std::filesystem::create_directories(dir);
  FlowConfig c;
  c.s_end = 2.0;
  write_file_atomic((dir / "a.csv").string(), diagnostics_csv(run(c)));
  write_file_atomic((dir / "b.csv").string(), diagnostics_csv(run(c)));
  const std::string a = read_file((dir / "a.csv").string());
  const bool csv_same = !a.empty() && a == read_file((dir / "b.csv").string());

  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  const ModalField u = eval_bubble(grid, BubbleParams::on_axis(d, 0.4, 1.0, 1.3), 1e-10);
  save_field((dir / "plane.json").string(), u);
  const FieldFile fu = load_field((dir / "plane.json").string());
  const bool plane_same = fu.plane && fu.plane->profiles().rows() == u.profiles().rows() &&
                          fu.plane->profiles().cols() == u.profiles().cols() &&
                          (fu.plane->profiles().array() == u.profiles().array()).all();
  const ZonalSphereField v = run(c).last().v;
  save_field((dir / "sphere.json").string(), v);
  const FieldFile fv = load_field((dir / "sphere.json").string());
  const bool sphere_same = fv.sphere && fv.sphere->size() == v.size() && (fv.sphere->samples().array() == v.samples().array()).all();
  std::filesystem::remove_all(dir);
  return {csv_same && plane_same && sphere_same, std::string("CSV rerun ") + (csv_same ? "identical" : "differs") + " (" +
                                                     std::to_string(a.size()) + " bytes); plane field " +
                                                     (plane_same ? "bit-exact" : "differs") + "; sphere field " +
                                                     (sphere_same ? "bit-exact" : "differs")};
}

}  // namespace

int main() {
  criterion(1, "bubble identities", 1.0, bubble_identities_check);
  criterion(2, "stationary residual", 1.0, residual_check);
  criterion(3, "weighted spectrum", 30.0, spectrum_check);
  criterion(4, "spectral gap on random trials", 30.0, rayleigh_check);
  criterion(5, "perturbed bubble stability", 60.0, perturbed_family_check);
  criterion(6, "two-bubble counterexample", 60.0, two_bubble_check);

  std::optional<CalibrationResult> cal;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    FlowConfig c;
    c.s_end = 10.0;
    c.calibration = CalibrationConfig{true, 0.9, 1.1, 1e-10, 80};
    cal = calibrate_amplitude(c);
  } catch (const std::exception& e) {
    std::printf("calibration error: %s\n", e.what());
  }
  const double cal_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double amplitude = cal ? cal->critical_amplitude : 1.0;

  criterion(7, "flow structure", 300.0, [&] { return flow_structure_check(amplitude); });
  criterion(8, "convergence rate", 600.0 - cal_secs, [&]() -> Outcome {
    if (!cal) return {false, "calibration did not bracket"};
    Outcome o = rate_check(*cal);
    o.detail += "; calibration " + fmt("%.1f", cal_secs) + "s";
    return o;
  });
  criterion(9, "conformal dictionary", 5.0, conformal_check);
  criterion(10, "determinism and serialization", 0.0, determinism_check);
  return failures == 0 ? 0 : 1;
}
