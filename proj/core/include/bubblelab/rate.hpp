#pragma once

// Post-processing of flow trajectories: nearest stationary profile, the
// renormalized profile, exponential fits, the Cauchy-in-time checks and the
// weighted sup residual.

#include <string>
#include <vector>

#include "bubblelab/flow.hpp"

namespace bubblelab {

/// Conformal-energy inner product \int (1-t^2) a_t b_t + n(n-2)/4 a b on S^n,
/// equal to the planar Dirichlet inner product of the images.
double energy_inner(const ZonalSphereField& a, const ZonalSphereField& b);

struct ZonalFit {
  double lambda = 1.0;
  double amplitude = 1.0;
  double cost = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Minimizes the conformal energy of v - amplitude * sphere_bubble(kappa, lambda)
/// over lambda (and the amplitude if `fit_amplitude`).
ZonalFit fit_zonal_bubble(const ZonalSphereField& v, double kappa, bool fit_amplitude);

struct NearestStationary {
  double lambda = 1.0;
  double z = 0.0;
  ZonalSphereField W;
  ZonalSphereField rho;
  double rho_h1 = 0.0;      // ||grad rho||
  double rho_ratio = 0.0;   // ||grad rho|| / ||grad w||
  double orth_gradient = 0.0;  // \int grad W . grad rho / (||grad W|| ||grad w||)
  double orth_power = 0.0;     // \int W^p rho / \int W^p w
  double orth_lambda = 0.0;    // \int grad dW/dlambda . grad rho, normalized
  bool converged = false;
};

/// Closest member of the stationary family v_{cFlow}[0, lambda] in the energy norm.
NearestStationary nearest_stationary(const ZonalSphereField& w);

struct RenormalizedProfile {
  double K0 = 0.0;
  double alpha = 1.0;      // [(1-m) K0]^{1/(p-1)}
  double lambda = 1.0;     // scale of the projection
  double z = 0.0;
  double projection_amplitude = 1.0;
  ZonalSphereField W_bar;  // v_{K0}[0, lambda]
  ZonalSphereField W_hat;  // alpha W_bar = v_{cFlow}[0, lambda]
  double distance = 0.0;   // ||grad w - grad W_hat||
  bool converged = false;
};

RenormalizedProfile renormalized_profile(const ZonalSphereField& w);

struct ExponentialFit {
  double rate = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
  int samples = 0;
  double s_a = 0.0;
  double s_b = 0.0;
};

/// Least-squares line through (s, log value) on [s_a, s_b]; rate = -slope.
ExponentialFit fit_exponential(const std::vector<double>& s, const std::vector<double>& values, double s_a,
                               double s_b);

/// sup over sphere nodes of (1 + r^{n+2}) |w^p - W_hat^p| in planar variables.
double weighted_sup_residual(const ZonalSphereField& w, const RenormalizedProfile& profile);
double weighted_sup_residual(const ZonalSphereField& w);

struct CauchyCheck {
  bool pass = false;
  std::string reason;
  int pairs = 0;
  double constant = 0.0;     // max over pairs of \int|w(s)-w(t)|^{2*} / \int_t^s delta
  int blocks = 0;
  double block_margin = 0.0; // min over unit blocks of \int delta^2 - (\int delta)^2
  bool blocks_ok = false;
  ExponentialFit tail;       // \int_t^end delta ~ C e^{-c t}
  bool tail_ok = false;
};

CauchyCheck cauchy_tail_check(const Trajectory& traj, double s_a, double s_b, int pairs = 20);

struct RateOptions {
  double start_ratio = 0.1;   // window starts when ||grad rho|| / ||grad w|| < start_ratio
  double noise_factor = 10.0; // window ends at noise_factor times the noise level of that ratio
  int min_samples = 10;
  double ratio_band = 10.0;   // I / ||grad rho||^2 in [1/band, band]
};

struct RateReport {
  bool applicable = false;
  std::string reason;
  double s_a = 0.0;
  double s_b = 0.0;
  int samples = 0;
  double noise_ratio = 0.0;
  ExponentialFit I_fit;
  ExponentialFit rho_fit;
  ExponentialFit I_fit_half;
  double kappaFit = 0.0;
  double kappaRho = 0.0;
  double r2 = 0.0;
  double half_window_change = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  bool ratio_ok = false;
  std::vector<double> theta_s;
  std::vector<double> theta_sup;
  ExponentialFit theta_fit;
  double thetaSup = 0.0;
  double theta_ripple = 0.0;
  bool theta_monotone = false;
  CauchyCheck cauchy;
  ExponentialFit l2star_fit;      // \int |W_inf - w(s)|^{2*}
  double C_K0 = 0.0;              // max |K0 - cFlow|^2 / (-dJ/ds)
  double C_profile = 0.0;         // max ||grad(w - W_hat)||^2 / (delta^2 + |K0 - cFlow|^2)
  double orth_max = 0.0;          // largest orthogonality residual at the end of the window
  double final_lambda = 1.0;
  double mass_min = 0.0;
  double mass_max = 0.0;
  bool delta_bound_ok = false;
};

RateReport analyze(const Trajectory& traj, const RateOptions& opts = {});

}  // namespace bubblelab
