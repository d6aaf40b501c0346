#include "bubblelab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace bubblelab {

using json = nlohmann::ordered_json;

namespace {

json grid_json(const GridSpec& g) {
  return json{{"map_scale", g.map_scale}, {"panels", g.panels}, {"nodes_per_panel", g.nodes_per_panel}};
}

std::string schema_string() { return std::to_string(kSchemaMajor) + "." + std::to_string(kSchemaMinor); }

void check_schema(const json& doc) {
  if (!doc.contains("schema_version") || !doc["schema_version"].is_string())
    throw InvalidArgument("field file: missing schema_version");
  const std::string v = doc["schema_version"].get<std::string>();
  int major = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), major);
  if (res.ec != std::errc()) throw InvalidArgument("field file: bad schema_version '" + v + "'");
  if (major > kSchemaMajor) throw InvalidArgument("field file: schema " + v + " is newer than supported " + schema_string());
}

std::vector<double> finite_values(const Eigen::VectorXd& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  for (double x : out)
    if (!std::isfinite(x)) throw NonPositiveField("field file: non-finite sample");
  return out;
}

// Config reader that rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InvalidArgument("config: '" + path_ + "' must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    auto it = j_.find(key);
    if (it == j_.end()) return;
    used_.insert(key);
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw InvalidArgument("config: bad type for '" + path_ + key + "'");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  Reader sub(const char* key) {
    used_.insert(key);
    return Reader(j_.at(key), path_ + key + ".");
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw InvalidArgument("config: unknown key '" + path_ + it.key() + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void read_grid(Reader r, GridSpec& g) {
  r.get("map_scale", g.map_scale);
  r.get("panels", g.panels);
  r.get("nodes_per_panel", g.nodes_per_panel);
  r.finish();
}

json fit_json(const ExponentialFit& f) {
  return json{{"rate", f.rate}, {"prefactor", f.prefactor}, {"r2", f.r2}, {"samples", f.samples},
              {"window", {f.s_a, f.s_b}}};
}

json safe(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string field_to_json(const ModalField& u) {
  json doc;
  doc["schema_version"] = schema_string();
  doc["dim"] = u.dim().n();
  doc["axis"] = u.axis();
  doc["grid"] = grid_json(u.grid().spec());
  doc["representation"] = "plane-modal";
  json modes = json::array();
  for (int l = 0; l <= u.lmax(); ++l) modes.push_back(json{{"l", l}, {"values", finite_values(u.profiles().col(l))}});
  doc["modes"] = std::move(modes);
  return doc.dump(1);
}

std::string field_to_json(const ZonalSphereField& v) {
  json doc;
  doc["schema_version"] = schema_string();
  doc["dim"] = v.dim().n();
  std::vector<double> axis(v.dim().n() + 1, 0.0);
  axis.back() = 1.0;
  doc["axis"] = axis;
  doc["grid"] = json{{"nodes", v.size()}};
  doc["representation"] = "sphere-zonal";
  doc["modes"] = json::array({json{{"l", 0}, {"values", finite_values(v.samples())}}});
  return doc.dump(1);
}

FieldFile field_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("field file: ") + e.what());
  }
  check_schema(doc);
  try {
    const Dimension dim(doc.at("dim").get<int>());
    const std::string rep = doc.at("representation").get<std::string>();
    const json& modes = doc.at("modes");
    FieldFile out;
    if (rep == "sphere-zonal") {
      const int nodes = doc.at("grid").at("nodes").get<int>();
      auto sphere = SphereGrid::make(dim, nodes);
      if (modes.size() != 1) throw InvalidArgument("field file: sphere fields carry one sample block");
      const auto vals = modes[0].at("values").get<std::vector<double>>();
      if (static_cast<int>(vals.size()) != nodes) throw InvalidArgument("field file: sample count mismatch");
      out.sphere = ZonalSphereField(sphere, Eigen::Map<const Eigen::VectorXd>(vals.data(), nodes));
    } else if (rep == "plane-modal") {
      GridSpec spec;
      const json& g = doc.at("grid");
      spec.map_scale = g.at("map_scale").get<double>();
      spec.panels = g.at("panels").get<int>();
      spec.nodes_per_panel = g.at("nodes_per_panel").get<int>();
      auto grid = RadialGrid::make(dim, spec);
      const auto axis = doc.at("axis").get<std::vector<double>>();
      Eigen::MatrixXd prof = Eigen::MatrixXd::Zero(grid->size(), static_cast<Eigen::Index>(modes.size()));
      for (const auto& m : modes) {
        const int l = m.at("l").get<int>();
        if (l < 0 || l >= static_cast<int>(modes.size())) throw InvalidArgument("field file: bad mode index");
        const auto vals = m.at("values").get<std::vector<double>>();
        if (static_cast<int>(vals.size()) != grid->size()) throw InvalidArgument("field file: sample count mismatch");
        prof.col(l) = Eigen::Map<const Eigen::VectorXd>(vals.data(), grid->size());
      }
      out.plane = ModalField(grid, std::move(prof), axis);
    } else {
      throw InvalidArgument("field file: unknown representation '" + rep + "'");
    }
    return out;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("field file: ") + e.what());
  }
}

void save_field(const std::string& path, const ModalField& u) { write_file_atomic(path, field_to_json(u)); }
void save_field(const std::string& path, const ZonalSphereField& v) { write_file_atomic(path, field_to_json(v)); }
FieldFile load_field(const std::string& path) { return field_from_json(read_file(path)); }

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp.string());
    os << content;
    os.flush();
    if (!os) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

double ScenarioSpec::get(const std::string& key, double fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

ScenarioSpec parse_scenario(const std::string& text) {
  ScenarioSpec spec;
  std::stringstream ss(text);
  std::string item;
  bool first = true;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      if (!first) throw InvalidArgument("scenario: expected key=value, got '" + item + "'");
      spec.kind = item;
    } else {
      const std::string key = item.substr(0, eq);
      const std::string val = item.substr(eq + 1);
      double x = 0.0;
      const auto res = std::from_chars(val.data(), val.data() + val.size(), x);
      if (res.ec != std::errc() || res.ptr != val.data() + val.size())
        throw InvalidArgument("scenario: bad number '" + val + "'");
      spec.values[key] = x;
      if (first && key == "eps") spec.kind = "perturbed";
      if (first && key == "d") spec.kind = "two-bubble";
    }
    first = false;
  }
  static const std::set<std::string> kinds{"bubble", "stationary", "perturbed", "two-bubble"};
  if (!kinds.count(spec.kind)) throw InvalidArgument("scenario: unknown kind '" + spec.kind + "'");
  return spec;
}

ScenarioField make_scenario_field(const Dimension& dim, const GridSpec& grid_spec, const ScenarioSpec& spec) {
  if (spec.kind == "bubble" || spec.kind == "stationary") {
    const double kappa = spec.kind == "stationary" ? dim.c_flow() : spec.get("kappa", 1.0);
    const BubbleParams bp =
        BubbleParams::on_axis(dim, spec.get("z", 0.0), kappa, spec.get("lambda", 1.0), spec.get("alpha", 1.0));
    auto grid = RadialGrid::make(dim, grid_spec);
    return {eval_bubble(grid, bp), std::nullopt, spec.kind};
  }
  if (spec.kind == "perturbed") {
    auto grid = RadialGrid::make(dim, grid_spec);
    PerturbedBubble pb = make_perturbed_bubble(cap_profile(grid), spec.get("eps", 1e-3));
    return {std::move(pb.u), std::move(pb.K), "perturbed bubble"};
  }
  const auto params = two_bubble_params(dim, spec.get("d", 20.0));
  auto grid = RadialGrid::make(dim, multibubble_grid_spec(params));
  MultiBubble mb = make_multibubble(grid, params);
  return {std::move(mb.u), std::move(mb.K), "two bubbles"};
}

RunConfig parse_run_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  Reader top(doc, "");
  top.get("command", cfg.command);
  top.get("n", cfg.n);
  if (top.has("grid")) read_grid(top.sub("grid"), cfg.grid);
  top.get("scenario", cfg.scenario);
  top.get("kappas", cfg.kappas);
  top.get("seed", cfg.seed);
  top.get("input", cfg.input);
  top.get("out", cfg.out);
  top.get("svg", cfg.svg);
  if (top.has("spectrum")) {
    Reader r = top.sub("spectrum");
    r.get("lmax", cfg.lmax);
    r.get("trials", cfg.trials);
    r.get("count", cfg.spectral.count);
    r.get("cutoff_factor", cfg.spectral.cutoff_factor);
    r.get("two_grid_tol", cfg.spectral.two_grid_tol);
    r.finish();
  }
  if (top.has("projection")) {
    Reader r = top.sub("projection");
    r.get("max_starts", cfg.projection.max_starts);
    r.get("gradient_tol", cfg.projection.gradient_tol);
    r.get("max_abs_log_scale", cfg.projection.max_abs_log_scale);
    r.get("parallel", cfg.projection.parallel);
    r.finish();
  }
  FlowConfig& f = cfg.flow;
  if (top.has("flow")) {
    Reader r = top.sub("flow");
    std::string rep = to_string(f.representation);
    r.get("representation", rep);
    f.representation = representation_from_string(rep);
    r.get("sphere_nodes", f.sphere_nodes);
    r.get("amplitude", f.initial.amplitude);
    r.get("epsilon", f.initial.epsilon);
    r.get("degree", f.initial.degree);
    r.get("ds0", f.ds0);
    r.get("ds_max", f.ds_max);
    r.get("s_end", f.s_end);
    r.get("adaptive", f.adaptive);
    r.get("step_tol", f.step_tol);
    r.get("newton_tol", f.newton_tol);
    r.get("floor", f.floor_rel);
    r.get("output_interval", f.output_interval);
    r.get("mass_low", f.mass_low);
    r.get("mass_high", f.mass_high);
    r.get("converged_band", f.converged_band);
    r.finish();
  }
  if (top.has("calibration")) {
    Reader r = top.sub("calibration");
    r.get("enabled", f.calibration.enabled);
    r.get("lo", f.calibration.lo);
    r.get("hi", f.calibration.hi);
    r.get("tol", f.calibration.tol);
    r.get("max_iterations", f.calibration.max_iterations);
    r.finish();
  }
  if (top.has("rate")) {
    Reader r = top.sub("rate");
    r.get("start_ratio", cfg.rate.start_ratio);
    r.get("noise_factor", cfg.rate.noise_factor);
    r.get("min_samples", cfg.rate.min_samples);
    r.get("ratio_band", cfg.rate.ratio_band);
    r.finish();
  }
  top.finish();
  if (cfg.n < 3) throw InvalidArgument("config: n must be >= 3");
  f.n = cfg.n;
  f.grid = cfg.grid;
  f.validate();
  return cfg;
}

std::string identities_json(const std::vector<BubbleIdentities>& ids, const Dimension& dim) {
  json doc;
  doc["n"] = dim.n();
  doc["S_power_closed_form"] = sobolev_power(dim);
  json rows = json::array();
  for (const auto& b : ids) {
    rows.push_back(json{{"kappa", b.kappa}, {"dirichlet", b.dirichlet}, {"mass", b.mass}, {"S", b.s_est},
                        {"ratio", b.ratio}, {"disagreement", b.disagreement}, {"resolved", b.resolved}});
  }
  doc["identities"] = std::move(rows);
  return doc.dump(2);
}

std::string projection_json(const ProjectionResult& r) {
  json doc;
  doc["alpha"] = r.params.amplitude;
  doc["lambda"] = r.params.scale;
  doc["z"] = r.axial_center;
  doc["rhoH1"] = r.rhoH1;
  doc["rhoH1_physical"] = r.rhoH1_physical;
  doc["ortho_residuals"] = {r.ortho_residuals[0], r.ortho_residuals[1], r.ortho_residuals[2]};
  doc["delta"] = r.delta;
  doc["ratio"] = safe(r.ratio);
  doc["dirichlet_u"] = r.dirichlet_u;
  doc["objective"] = r.objective;
  doc["converged"] = r.converged;
  doc["guard_warning"] = r.guard_warning;
  doc["starts"] = r.multistart;
  doc["converged_starts"] = r.converged_starts;
  doc["status"] = r.status;
  return doc.dump(2);
}

std::string stability_json(const StabilityReport& r) {
  json doc;
  doc["K0_input"] = r.K0_input;
  doc["normalization"] = r.normalization;
  doc["energy_ratio"] = r.energy_ratio;
  doc["K0_ok"] = r.K0_ok;
  doc["energy_ok"] = r.energy_ok;
  doc["skipped"] = r.skipped;
  doc["reason"] = r.reason;
  doc["delta"] = r.delta;
  doc["rho_prime_h1"] = r.rho_prime_h1;
  doc["C_ratio"] = r.C_ratio ? json(*r.C_ratio) : json(nullptr);
  doc["alpha_minus_one"] = r.alpha_minus_one;
  doc["alpha_K"] = r.alpha_K ? json(*r.alpha_K) : json(nullptr);
  if (r.projection) doc["projection"] = json::parse(projection_json(*r.projection));
  return doc.dump(2);
}

std::string spectrum_json(const SpectrumResult& r, const std::optional<RayleighReport>& rayleigh) {
  json doc;
  doc["n"] = r.n;
  doc["p"] = r.p;
  doc["Lambda"] = r.Lambda;
  doc["gap_ok"] = r.gap_ok;
  doc["extrapolation_ok"] = r.extrapolation_ok;
  json bands = json::array();
  for (const auto& b : r.bands) bands.push_back(json{{"value", b.value}, {"multiplicity", b.multiplicity}, {"degrees", b.degrees}});
  doc["bands"] = std::move(bands);
  json deg = json::object();
  for (const auto& [l, d] : r.per_degree) {
    deg[std::to_string(l)] = json{{"values", d.values}, {"coarse", d.values_coarse}, {"labels", d.labels},
                                  {"max_rel_change", d.max_rel_change}, {"converged", d.converged}};
  }
  doc["degrees"] = std::move(deg);
  if (rayleigh) doc["rayleigh"] = json{{"trials", rayleigh->quotients.size()}, {"min_quotient", rayleigh->min_quotient}};
  return doc.dump(2);
}

std::string rate_json(const RateReport& r) {
  json doc;
  doc["applicable"] = r.applicable;
  doc["reason"] = r.reason;
  if (!r.applicable) return doc.dump(2);
  doc["fitWindow"] = {r.s_a, r.s_b};
  doc["samples"] = r.samples;
  doc["kappaFit"] = r.kappaFit;
  doc["kappaRho"] = r.kappaRho;
  doc["r2"] = r.r2;
  doc["half_window_change"] = safe(r.half_window_change);
  doc["ratioBand"] = {r.ratio_min, r.ratio_max};
  doc["ratio_ok"] = r.ratio_ok;
  doc["thetaSup"] = r.thetaSup;
  doc["theta_fit"] = fit_json(r.theta_fit);
  doc["theta_ripple"] = r.theta_ripple;
  doc["cauchyCheck"] = json{{"pass", r.cauchy.pass},
                            {"constant", r.cauchy.constant},
                            {"pairs", r.cauchy.pairs},
                            {"blocks", r.cauchy.blocks},
                            {"block_margin", r.cauchy.block_margin},
                            {"tail", fit_json(r.cauchy.tail)},
                            {"reason", r.cauchy.reason}};
  doc["l2star_fit"] = fit_json(r.l2star_fit);
  doc["C_K0"] = r.C_K0;
  doc["C_profile"] = r.C_profile;
  doc["orth_max"] = r.orth_max;
  doc["final_lambda"] = r.final_lambda;
  doc["mass_band"] = {r.mass_min, r.mass_max};
  doc["delta_bound_ok"] = r.delta_bound_ok;
  return doc.dump(2);
}

std::string flow_json(const Trajectory& t, const RateReport& rate, const std::optional<CalibrationResult>& cal) {
  json doc;
  doc["n"] = t.config.n;
  doc["classification"] = to_string(t.classification);
  doc["message"] = t.message;
  doc["amplitude"] = t.config.initial.amplitude;
  doc["s_final"] = t.last().s;
  doc["accepted_steps"] = t.accepted_steps;
  doc["rejected_steps"] = t.rejected_steps;
  doc["residence"] = t.residence;
  doc["stationary_mass"] = t.stationary_mass;
  if (cal) {
    doc["calibration"] = json{{"critical_amplitude", cal->critical_amplitude}, {"lo", cal->lo}, {"hi", cal->hi},
                              {"iterations", cal->iterations}};
  }
  doc["rate"] = json::parse(rate_json(rate));
  return doc.dump(2);
}

std::string diagnostics_csv(const Trajectory& t) {
  std::string out = "s,J,I,delta,K0,mass,rhoH1,alpha,lambda,z,dt_accepted\n";
  for (const auto& r : t.diagnostics) {
    const double vals[] = {r.s, r.J, r.I, r.delta, r.K0, r.mass, r.rhoH1, r.alpha, r.lambda, r.z, r.dt_accepted};
    for (std::size_t i = 0; i < std::size(vals); ++i) {
      if (i) out += ',';
      out += format_double(vals[i]);
    }
    out += '\n';
  }
  return out;
}

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series, bool log_y) {
  const double W = 640, H = 400, ml = 70, mr = 20, mt = 40, mb = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double y = ty(s.y[i]);
      if (!std::isfinite(y)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - mb + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
       << format_double(std::round(xv * 1000) / 1000) << "</text>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
       << format_double(std::round(yv * 1000) / 1000) << "</text>\n";
  }
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
     << ")\" text-anchor=\"middle\" font-size=\"13\">" << (log_y ? "log10 " : "") << ylabel << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    os << "<polyline fill=\"none\" stroke=\"" << colors[k % 5] << "\" stroke-width=\"1.5\"";
    if (s.dashed) os << " stroke-dasharray=\"6,4\"";
    os << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double y = ty(s.y[i]);
      if (!std::isfinite(y)) continue;
      os << px(s.x[i]) << "," << py(y) << " ";
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - mr - 150 << "\" y=\"" << mt + 16 * (k + 1) << "\" font-size=\"12\" fill=\""
       << colors[k % 5] << "\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string rate_svg(const Trajectory& t, const RateReport& r) {
  PlotSeries I{"I[w(s)]", {}, {}, false}, fit{"fit", {}, {}, true}, ratio{"I / |grad rho|^2", {}, {}, false};
  for (const auto& d : t.diagnostics) {
    if (d.I > 0.0) {
      I.x.push_back(d.s);
      I.y.push_back(d.I);
    }
    if (r.applicable && d.s >= r.s_a && d.s <= r.s_b) {
      fit.x.push_back(d.s);
      fit.y.push_back(r.I_fit.prefactor * std::exp(-r.I_fit.rate * d.s));
      ratio.x.push_back(d.s);
      ratio.y.push_back(d.I / (d.rhoH1 * d.rhoH1));
    }
  }
  std::string top = svg_plot("energy gap", "s", "I", {I, fit}, true);
  std::string bottom = svg_plot("ratio band", "s", "I / |grad rho|^2", {ratio}, false);
  // stack the two plots
  auto body = [](const std::string& s) {
    const auto a = s.find('>') + 1;
    const auto b = s.rfind("</svg>");
    return s.substr(a, b - a);
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"800\">\n<g>" << body(top)
     << "</g>\n<g transform=\"translate(0,400)\">" << body(bottom) << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace bubblelab
