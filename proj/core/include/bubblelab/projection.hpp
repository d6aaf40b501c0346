#pragma once

// Nearest-bubble fit u ~ alpha v_1[z, lambda] in the Dirichlet norm, K0
// normalisation and the stability check with the amplitude absorption
// rho' = rho + (alpha - 1) U.

#include <array>
#include <optional>
#include <string>

#include "bubblelab/field.hpp"

namespace bubblelab {

struct ProjectionOptions {
  int max_starts = 8;
  double gradient_tol = 1e-10;  // relative to \int |grad u|^2
  double max_abs_log_scale = 9.21;  // |log lambda| beyond this counts as escape (1e4)
  bool parallel = true;
  bool compute_delta = true;
  const ModalField* K = nullptr;  // curvature for the deficit; Delta-form if null
};

struct ProjectionResult {
  BubbleParams params;        // kappa = 1, centre on the axis
  double axial_center = 0.0;  // z along the axis
  ModalField rho;             // u - alpha v_1[z, lambda]
  double rhoH1 = 0.0;           // modal route
  double rhoH1_physical = 0.0;  // tensor-grid route
  std::array<double, 3> ortho_residuals{};  // U, V, W; normalised by |grad X| |grad u|
  double delta = 0.0;
  double ratio = 0.0;  // rhoH1 / delta
  double dirichlet_u = 0.0;
  double objective = 0.0;  // |grad u - alpha grad v|^2
  bool converged = false;
  bool guard_warning = false;  // |grad rho| > 0.2 |grad u|
  int multistart = 0;
  int converged_starts = 0;
  std::string status;
};

/// Multi-start Gauss-Newton/Levenberg-Marquardt fit over (log alpha, z, log lambda).
/// Throws Unresolved if no start yields an admissible fit.
ProjectionResult project_to_bubble(const ModalField& u, const ProjectionOptions& opts = {});

/// c u with c = K0(u)^{1/(2*-2)}, so that K0(c u) = 1.
ModalField normalize_k0(const ModalField& u);
double normalization_factor(const ModalField& u);

struct StabilityReport {
  double K0_input = 0.0;
  double normalization = 1.0;
  double energy_ratio = 0.0;  // \int |grad u|^2 / S^n after normalisation
  bool K0_ok = false;
  bool energy_ok = false;
  bool skipped = false;
  std::string reason;
  double delta = 0.0;
  double rho_prime_h1 = 0.0;
  std::optional<double> C_ratio;  // |grad rho'| / delta; empty when delta is zero
  double alpha_minus_one = 0.0;
  std::optional<double> alpha_K;  // |alpha - 1| / delta^2
  std::optional<ProjectionResult> projection;
};

struct StabilityOptions {
  ProjectionOptions projection;
  double zero_delta = 1e-8;  // deficits below this count as zero
};

StabilityReport stability_check(const ModalField& u, const StabilityOptions& opts = {});

}  // namespace bubblelab
