#pragma once

// Field files, run configuration, reports, CSV diagnostics and SVG plots.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bubblelab/bubble.hpp"
#include "bubblelab/projection.hpp"
#include "bubblelab/rate.hpp"
#include "bubblelab/spectral.hpp"

namespace bubblelab {

inline constexpr int kSchemaMajor = 1;
inline constexpr int kSchemaMinor = 0;

/// Field file contents: exactly one of the two representations.
struct FieldFile {
  std::optional<ModalField> plane;
  std::optional<ZonalSphereField> sphere;
};

std::string field_to_json(const ModalField& u);
std::string field_to_json(const ZonalSphereField& v);
/// Throws InvalidArgument on malformed documents or a newer schema major.
FieldFile field_from_json(const std::string& text);
void save_field(const std::string& path, const ModalField& u);
void save_field(const std::string& path, const ZonalSphereField& v);
FieldFile load_field(const std::string& path);

/// Writes to a temporary sibling file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);

/// Scenario strings: "bubble", "stationary", "eps=1e-3", "perturbed,eps=1e-3",
/// "two-bubble,d=20", "bubble,kappa=2,lambda=0.5,z=0.3".
struct ScenarioSpec {
  std::string kind = "bubble";
  std::map<std::string, double> values;

  double get(const std::string& key, double fallback) const;
};

ScenarioSpec parse_scenario(const std::string& text);

struct ScenarioField {
  ModalField u;
  std::optional<ModalField> K;
  std::string description;
};

/// Planar scenario fields: bubble, perturbed (v_1 + eps cap), two-bubble.
ScenarioField make_scenario_field(const Dimension& dim, const GridSpec& grid, const ScenarioSpec& spec);

struct RunConfig {
  std::string command;
  int n = 3;
  GridSpec grid;
  std::string scenario = "bubble";
  std::vector<double> kappas;
  std::uint64_t seed = 42;
  std::string input;
  std::string out;
  std::string svg;
  int lmax = 2;
  int trials = 100;
  SpectralOptions spectral;
  ProjectionOptions projection;
  FlowConfig flow;
  RateOptions rate;
};

/// Parses a JSON run configuration; unknown keys are rejected with their path.
RunConfig parse_run_config(const std::string& text);

std::string identities_json(const std::vector<BubbleIdentities>& ids, const Dimension& dim);
std::string projection_json(const ProjectionResult& r);
std::string stability_json(const StabilityReport& r);
std::string spectrum_json(const SpectrumResult& r, const std::optional<RayleighReport>& rayleigh = std::nullopt);
std::string rate_json(const RateReport& r);
std::string flow_json(const Trajectory& t, const RateReport& rate, const std::optional<CalibrationResult>& cal);

/// Columns s, J, I, delta, K0, mass, rhoH1, alpha, lambda, z, dt_accepted.
std::string diagnostics_csv(const Trajectory& t);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

/// Minimal SVG line plot; with log_y the y values are plotted as log10.
std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series, bool log_y);
/// log I against s with the fitted line, and the ratio I / ||grad rho||^2.
std::string rate_svg(const Trajectory& t, const RateReport& r);

}  // namespace bubblelab
