#pragma once

// Rescaled fast diffusion flow d/ds w^p = Delta w + cFlow w^p, integrated on
// S^n as d/ds v^p = Delta_S v - n(n-2)/4 v + cFlow v^p for zonal v.
// Backward Euler in psi = v^p with step doubling; the extrapolated value
// 2 psi_half - psi_full is kept.

#include <optional>
#include <string>
#include <vector>

#include "bubblelab/conformal.hpp"
#include "bubblelab/functionals.hpp"

namespace bubblelab {

enum class Representation { PlaneRadial, SphereZonal };
enum class FlowClass { Running, Converged, Vanished, BlewUp, Aborted };

std::string to_string(Representation r);
std::string to_string(FlowClass c);
Representation representation_from_string(const std::string& s);

/// Initial data amplitude * c_inf * (1 + epsilon * P_k(t)), P_k the zonal
/// harmonic of degree k with P_k(1) = 1, or a user field times amplitude.
struct FlowScenario {
  double amplitude = 1.0;
  double epsilon = 1e-2;
  int degree = 2;
  std::optional<ModalField> plane;          // radial planar data
  std::optional<ZonalSphereField> sphere;   // zonal sphere data

  static FlowScenario stationary() { return FlowScenario{1.0, 0.0, 2, std::nullopt, std::nullopt}; }
  static FlowScenario perturbed(double eps, int degree = 2) {
    return FlowScenario{1.0, eps, degree, std::nullopt, std::nullopt};
  }
};

struct CalibrationConfig {
  bool enabled = false;
  double lo = 0.5;
  double hi = 2.0;
  double tol = 1e-10;  // relative bracket width
  int max_iterations = 80;
};

struct FlowConfig {
  int n = 3;
  Representation representation = Representation::SphereZonal;
  int sphere_nodes = 32;
  GridSpec grid;  // planar grid for PlaneRadial input and output
  FlowScenario initial = FlowScenario::perturbed(1e-2);
  double ds0 = 1e-3;
  double ds_max = 0.05;
  double s_end = 10.0;
  bool adaptive = true;
  double step_tol = 1e-7;       // step-doubling error per step, relative to max psi
  double newton_tol = 1e-11;    // residual relative to max psi
  int newton_max_iterations = 30;
  double floor_rel = 1e-14;     // positivity floor relative to initial max psi
  double output_interval = 0.0; // 0 records every accepted step
  double mass_low = 1e-6;
  double mass_high = 1e3;
  double converged_band = 0.5;  // |mass / stationary mass - 1| at the horizon
  bool diagnostics = true;
  CalibrationConfig calibration;

  void validate() const;
  Dimension dim() const { return Dimension(n); }
};

struct FlowState {
  double s = 0.0;
  ZonalSphereField v;
  double ds = 0.0;          // size of the step that produced this state
  bool accepted = true;
  int newton_iterations = 0;
  double error_estimate = 0.0;
};

struct DiagnosticsRow {
  double s = 0.0;
  double J = 0.0;
  double I = 0.0;
  double delta = 0.0;
  double K0 = 0.0;
  double mass = 0.0;
  double rhoH1 = 0.0;   // ||grad rho|| for the nearest stationary profile
  double alpha = 0.0;   // [(1-m) K0]^{1/(p-1)}
  double lambda = 1.0;  // nearest stationary scale
  double z = 0.0;       // centre along the axis, 0 for zonal states
  double dt_accepted = 0.0;
  double dissipation = 0.0;
  double delta_bound_rhs = 0.0;
  double energy = 0.0;  // ||grad w||^2
};

struct Trajectory {
  FlowConfig config;
  std::vector<FlowState> states;            // recorded states, states[0] is the initial data
  std::vector<DiagnosticsRow> diagnostics;  // one row per recorded state (if enabled)
  std::vector<double> step_s;               // every accepted step
  std::vector<double> step_J;
  FlowClass classification = FlowClass::Running;
  double lean = 0.0;              // sign of mass - stationary mass at the end
  double initial_mass = 0.0;
  double stationary_mass = 0.0;
  double j_reference = 0.0;       // J of the stationary family
  double residence = 0.0;         // first s with |mass/stationary - 1| > 1e-2
  int accepted_steps = 0;
  int rejected_steps = 0;
  std::string message;

  const FlowState& last() const { return states.back(); }
};

std::shared_ptr<const SphereGrid> flow_sphere_grid(const FlowConfig& config);
/// Initial zonal data on the flow grid.
ZonalSphereField initial_data(const FlowConfig& config, std::shared_ptr<const SphereGrid> sphere);

struct StepOptions {
  double newton_tol = 1e-11;
  int newton_max_iterations = 30;
};

/// One backward Euler step for psi = v^p; nullopt if Newton fails.
std::optional<ZonalSphereField> implicit_euler_step(const ZonalSphereField& v, double ds,
                                                    const StepOptions& opts, int* iterations = nullptr);

/// Step-doubled step of size ds. On failure the returned state has accepted = false.
FlowState step(const FlowState& state, double ds, const StepOptions& opts = {});

DiagnosticsRow diagnostics_row(const FlowState& state, double j_reference);

Trajectory run(const FlowConfig& config);

struct CalibrationResult {
  double critical_amplitude = 1.0;
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
  Trajectory trajectory;  // near-critical run at the better bracket end
};

/// Bisection on the amplitude between a sub-critical and a super-critical run.
CalibrationResult calibrate_amplitude(const FlowConfig& config);

/// +1 for super-critical outcomes (BlewUp, or above the stationary mass), -1 otherwise.
int criticality_side(const Trajectory& t);

struct AmplitudeScan {
  std::vector<double> amplitudes;
  std::vector<int> sides;
  int flips = 0;
  bool monotone = false;
};

/// Classifies `points` amplitudes spread over [lo, hi] as independent runs.
AmplitudeScan amplitude_scan(const FlowConfig& config, double lo, double hi, int points = 16);

}  // namespace bubblelab
