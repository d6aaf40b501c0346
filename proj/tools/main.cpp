// bubblelab command-line driver.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bubblelab/io.hpp"
#include "json.hpp"

using namespace bubblelab;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitFit = 2;
constexpr int kExitCalibration = 3;
constexpr int kExitUsage = 64;

struct Options {
  int n = 3;
  std::string grid;
  std::string scenario;
  std::string config;
  std::string input;
  std::string out;
  std::string svg;
  std::uint64_t seed = 42;
  std::vector<double> kappas;
  int lmax = 2;
  int trials = 100;
  int sphere_nodes = 32;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  if (text.empty()) return g;
  std::stringstream ss(text);
  std::string a, b, c;
  if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
    throw InvalidArgument("--grid expects map_scale,panels,nodes_per_panel");
  g.map_scale = std::stod(a);
  g.panels = std::stoi(b);
  g.nodes_per_panel = std::stoi(c);
  return g;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text << (text.empty() || text.back() == '\n' ? "" : "\n");
  } else {
    write_file_atomic(o.out, text.back() == '\n' ? text : text + "\n");
  }
}

ModalField input_or_scenario(const Options& o, std::optional<ModalField>* K) {
  if (!o.input.empty()) {
    FieldFile f = load_field(o.input);
    if (f.plane) return *f.plane;
    auto grid = RadialGrid::make(f.sphere->dim(), parse_grid(o.grid));
    return sphere_to_plane(*f.sphere, grid);
  }
  ScenarioField sf = make_scenario_field(Dimension(o.n), parse_grid(o.grid), parse_scenario(o.scenario.empty() ? "bubble" : o.scenario));
  if (K) *K = sf.K;
  return sf.u;
}

int cmd_bubble_check(const Options& o) {
  const Dimension dim(o.n);
  std::vector<double> kappas = o.kappas;
  if (kappas.empty()) kappas = {1.0, dim.c_flow(), 2.0};
  auto grid = RadialGrid::make(dim, parse_grid(o.grid));
  std::vector<BubbleIdentities> ids;
  int status = 0;
  std::string first_failure;
  const double S_n = sobolev_power(dim);
  for (double k : kappas) {
    ids.push_back(bubble_identities(dim, k, *grid));
    const auto& b = ids.back();
    const double rel_d = std::abs(b.dirichlet / (S_n * std::pow(k, -0.5 * (o.n - 2))) - 1.0);
    const double rel_m = std::abs(b.mass / (S_n * std::pow(k, -0.5 * o.n)) - 1.0);
    const double res = bubble_residual(dim, k, *RadialGrid::make(dim, grid->refined_spec()));
    if ((!b.resolved || rel_d > 1e-8 || rel_m > 1e-8 || res > 1e-8) && first_failure.empty()) {
      status = kExitFailure;
      std::ostringstream ss;
      ss << "kappa=" << k << ": dirichlet " << rel_d << ", mass " << rel_m << ", residual " << res;
      first_failure = ss.str();
    }
  }
  emit(o, identities_json(ids, dim));
  std::cerr << "S = " << std::pow(S_n, 1.0 / o.n) << (status ? "; failed: " + first_failure : "; all identities hold")
            << "\n";
  return status;
}

int cmd_deficit(const Options& o) {
  std::optional<ModalField> K;
  const ModalField u = input_or_scenario(o, &K);
  const FunctionalReport r = functional_report(u, K ? &*K : nullptr);
  nlohmann::ordered_json doc{{"dirichlet", r.dirichlet}, {"mass", r.mass}, {"K0", r.K0}, {"delta", r.delta},
                             {"J", r.J}};
  emit(o, doc.dump(2));
  return 0;
}

int cmd_project(const Options& o) {
  std::optional<ModalField> K;
  const ModalField u = input_or_scenario(o, &K);
  StabilityOptions so;
  so.projection.K = K ? &*K : nullptr;
  try {
    const StabilityReport rep = stability_check(u, so);
    emit(o, stability_json(rep));
    std::cerr << "C_ratio = " << (rep.C_ratio ? std::to_string(*rep.C_ratio) : std::string("n/a"))
              << ", K0_ok = " << rep.K0_ok << ", energy_ok = " << rep.energy_ok
              << (rep.skipped ? ", skipped: " + rep.reason : std::string()) << "\n";
  } catch (const Unresolved& e) {
    std::cerr << "projection failed: " << e.what() << "\n";
    return kExitFit;
  }
  return 0;
}

int cmd_spectrum(const Options& o) {
  const Dimension dim(o.n);
  const GridSpec spec = parse_grid(o.grid);
  const SpectrumResult r = weighted_spectrum(dim, o.lmax, spec);
  std::optional<RayleighReport> ray;
  if (o.trials > 0) {
    auto grid = RadialGrid::make(dim, spec);
    ray = rayleigh_gap_check(random_trial_fields(grid, o.trials, o.seed), unit_basis(grid));
  }
  emit(o, spectrum_json(r, ray));
  std::cerr << "Lambda = " << r.Lambda << ", gap_ok = " << r.gap_ok << "\n";
  return r.gap_ok ? 0 : kExitFailure;
}

int cmd_transform(const Options& o) {
  if (o.input.empty()) throw InvalidArgument("transform needs --input");
  FieldFile f = load_field(o.input);
  std::string text;
  if (f.plane) {
    text = field_to_json(plane_to_sphere(*f.plane, SphereGrid::make(f.plane->dim(), o.sphere_nodes)));
  } else {
    text = field_to_json(sphere_to_plane(*f.sphere, RadialGrid::make(f.sphere->dim(), parse_grid(o.grid))));
  }
  emit(o, text);
  return 0;
}

int cmd_flow(const Options& o) {
  RunConfig cfg;
  if (!o.config.empty()) cfg = parse_run_config(read_file(o.config));
  else {
    cfg.n = o.n;
    cfg.flow.n = o.n;
  }
  if (!o.input.empty()) {
    FieldFile f = load_field(o.input);
    if (f.plane) cfg.flow.initial.plane = *f.plane;
    else cfg.flow.initial.sphere = *f.sphere;
  }
  std::optional<CalibrationResult> cal;
  Trajectory traj;
  if (cfg.flow.calibration.enabled) {
    try {
      cal = calibrate_amplitude(cfg.flow);
    } catch (const Unresolved& e) {
      std::cerr << "calibration failed: " << e.what() << "\n";
      return kExitCalibration;
    }
    traj = cal->trajectory;
  } else {
    traj = run(cfg.flow);
  }
  const RateReport rate = analyze(traj, cfg.rate);
  const std::string out = o.out.empty() ? cfg.out : o.out;
  const std::string svg = o.svg.empty() ? cfg.svg : o.svg;
  const std::string dir = out.empty() ? "." : out;
  write_file_atomic(dir + "/diagnostics.csv", diagnostics_csv(traj));
  write_file_atomic(dir + "/rate.json", flow_json(traj, rate, cal));
  if (!svg.empty()) write_file_atomic(svg, rate_svg(traj, rate));
  if (cfg.flow.representation == Representation::PlaneRadial) {
    save_field(dir + "/final.json", sphere_to_plane(traj.last().v, RadialGrid::make(traj.last().v.dim(), cfg.grid)));
  } else {
    save_field(dir + "/final.json", traj.last().v);
  }
  std::cerr << to_string(traj.classification) << "; kappaFit = "
            << (rate.applicable ? std::to_string(rate.kappaFit) : "not applicable (" + rate.reason + ")") << "\n";
  return traj.classification == FlowClass::Aborted ? kExitFailure : 0;
}

int cmd_rate_fit(const Options& o) {
  if (o.input.empty()) throw InvalidArgument("rate-fit needs --input diagnostics.csv");
  std::stringstream ss(read_file(o.input));
  std::string line;
  std::getline(ss, line);
  if (line.rfind("s,J,I,", 0) != 0) throw InvalidArgument("rate-fit: not a diagnostics CSV");
  std::vector<double> s, I, rho2;
  while (std::getline(ss, line)) {
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != 11) throw InvalidArgument("rate-fit: malformed row");
    s.push_back(v[0]);
    I.push_back(v[2]);
    rho2.push_back(v[6] * v[6]);
  }
  // window: from the first positive I up to the minimum of rho
  std::size_t a = 0;
  while (a < s.size() && !(I[a] > 0.0)) ++a;
  if (a == s.size()) {
    std::cerr << "rate-fit: no positive energy gap in the series\n";
    return kExitFit;
  }
  std::size_t b = a;
  for (std::size_t i = a; i < s.size() && I[i] > 0.0; ++i)
    if (rho2[i] <= rho2[b]) b = i;
  nlohmann::ordered_json doc;
  try {
    const ExponentialFit fi = fit_exponential(s, I, s.at(a), s.at(b));
    const ExponentialFit fr = fit_exponential(s, rho2, s.at(a), s.at(b));
    doc = {{"fitWindow", {fi.s_a, fi.s_b}}, {"kappaFit", fi.rate}, {"r2", fi.r2}, {"kappaRho", fr.rate},
           {"samples", fi.samples}};
  } catch (const std::exception& e) {
    std::cerr << "rate-fit: " << e.what() << "\n";
    return kExitFit;
  }
  emit(o, doc.dump(2));
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const Options& o) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& path : inputs) {
    const std::string text = read_file(path);
    try {
      doc[path] = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception&) {
      doc[path] = text;
    }
  }
  emit(o, doc.dump(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bubblelab: bubbles, deficits, spectral gaps and the rescaled fast diffusion flow"};
  app.require_subcommand(1);
  Options o;
  std::vector<std::string> report_inputs;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--n", o.n, "space dimension")->check(CLI::Range(3, 64));
    c->add_option("--grid", o.grid, "radial grid map_scale,panels,nodes_per_panel");
    c->add_option("--out", o.out, "output path");
    c->add_option("--seed", o.seed, "random seed");
  };
  auto* bc = app.add_subcommand("bubble-check", "bubble identities and stationary residuals");
  add_common(bc);
  bc->add_option("--kappa", o.kappas, "curvature values");
  auto* de = app.add_subcommand("deficit", "functional report of a field");
  add_common(de);
  de->add_option("--scenario", o.scenario, "scenario descriptor");
  de->add_option("--input", o.input, "field file");
  auto* pr = app.add_subcommand("project", "bubble projection and stability check");
  add_common(pr);
  pr->add_option("--scenario", o.scenario, "scenario descriptor");
  pr->add_option("--input", o.input, "field file");
  auto* sp = app.add_subcommand("spectrum", "weighted eigenvalues and the spectral gap");
  add_common(sp);
  sp->add_option("--lmax", o.lmax, "highest degree")->check(CLI::Range(0, 16));
  sp->add_option("--trials", o.trials, "random Rayleigh trials")->check(CLI::Range(0, 100000));
  auto* tr = app.add_subcommand("transform", "map a field file between R^n and S^n");
  add_common(tr);
  tr->add_option("--input", o.input, "field file")->required();
  tr->add_option("--sphere-nodes", o.sphere_nodes, "sphere grid size")->check(CLI::Range(4, 4096));
  auto* fl = app.add_subcommand("flow", "run, calibrate and rate-fit the rescaled flow");
  add_common(fl);
  fl->add_option("--config", o.config, "JSON run configuration");
  fl->add_option("--input", o.input, "initial field file");
  fl->add_option("--svg", o.svg, "SVG plot path");
  auto* rf = app.add_subcommand("rate-fit", "exponential fit of a diagnostics CSV");
  add_common(rf);
  rf->add_option("--input", o.input, "diagnostics CSV")->required();
  auto* rp = app.add_subcommand("report", "merge JSON reports");
  add_common(rp);
  rp->add_option("inputs", report_inputs, "JSON files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*bc) return cmd_bubble_check(o);
    if (*de) return cmd_deficit(o);
    if (*pr) return cmd_project(o);
    if (*sp) return cmd_spectrum(o);
    if (*tr) return cmd_transform(o);
    if (*fl) return cmd_flow(o);
    if (*rf) return cmd_rate_fit(o);
    if (*rp) return cmd_report(report_inputs, o);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
