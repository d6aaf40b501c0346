#pragma once

// The bubble family v_kappa[z, lambda], its parameter derivatives, the
// closed-form identities and the scenario generators used as test inputs.

#include <memory>
#include <vector>

#include "bubblelab/field.hpp"

namespace bubblelab {

/// (n(n-2)/kappa)^{(n-2)/4}.
double bubble_constant(const Dimension& dim, double kappa);

/// S^n = (pi n (n-2))^{n/2} Gamma(n/2) / Gamma(n), the Dirichlet energy of v_1.
double sobolev_power(const Dimension& dim);

/// Pointwise value at x in R^n.
double eval_bubble(const Dimension& dim, const BubbleParams& params, const std::vector<double>& x);

/// Value of an axis-centred bubble at (r, t), centre `z` units along the axis.
double bubble_value(const Dimension& dim, double kappa, double z, double lambda, double alpha,
                    double r, double t);
/// d/dlambda and d/dz of the bubble with alpha = 1.
double bubble_dlambda(const Dimension& dim, double kappa, double z, double lambda, double r, double t);
double bubble_dz(const Dimension& dim, double kappa, double z, double lambda, double r, double t);

/// Axial coordinate of a centre lying on `axis`; throws InvalidArgument if
/// the centre is off the axis.
double axial_coordinate(const BubbleParams& params, const std::vector<double>& axis);

/// Bubble as a ModalField. Centred bubbles are exactly radial; off-centre
/// bubbles are expanded up to the degree where the angular tail falls below
/// `tol`.
ModalField eval_bubble(std::shared_ptr<const RadialGrid> grid, const BubbleParams& params,
                       double tol = 1e-10, std::vector<double> axis = {});

struct BubbleBasis {
  BubbleParams params;
  ModalField U;  // v_1[z, lambda] (amplitude not applied)
  ModalField V;  // d/dlambda
  ModalField W;  // d/dz along the axis
};

BubbleBasis bubble_basis(std::shared_ptr<const RadialGrid> grid, const BubbleParams& params,
                         double tol = 1e-10, std::vector<double> axis = {});

struct BubbleIdentities {
  double kappa = 1.0;
  double dirichlet = 0.0;   // \int |grad v_kappa|^2
  double mass = 0.0;        // \int v_kappa^{2*}
  double s_est = 0.0;       // S from S^n = kappa^{(n-2)/2} dirichlet
  double ratio = 0.0;       // dirichlet / mass, equal to kappa
  double disagreement = 0.0;  // relative mismatch of S^n from the two identities
  bool resolved = false;
};

BubbleIdentities bubble_identities(const Dimension& dim, double kappa, const RadialGrid& grid,
                                   double tol = 1e-8);

/// Grid-weighted L^2 norm of Delta v_kappa + kappa v_kappa^p for the centred bubble.
double bubble_residual(const Dimension& dim, double kappa, const RadialGrid& grid);

/// Radial cap (1 - r^2)^3 on r < 1, zero outside.
ModalField cap_profile(std::shared_ptr<const RadialGrid> grid);

struct PerturbedBubble {
  ModalField u;  // v_1 + eps phi
  ModalField K;  // (v_1^p - eps Delta phi) / u^p
};

/// u_eps = v_1 + eps phi with the curvature K_eps making -Delta u = K u^p hold
/// on the grid. phi must be radial or resolved at its own lmax.
PerturbedBubble make_perturbed_bubble(const ModalField& phi, double eps);

struct MultiBubble {
  ModalField u;
  ModalField K;
};

/// u = sum v_1[z_i, lambda_i], K = sum v_i^p / u^p. Centres on the axis, pairwise distinct.
MultiBubble make_multibubble(std::shared_ptr<const RadialGrid> grid, const std::vector<BubbleParams>& params,
                             double tol = 1e-10, std::vector<double> axis = {});

/// Two unit bubbles at -d/2 and +d/2 on the axis.
std::vector<BubbleParams> two_bubble_params(const Dimension& dim, double separation);

/// Radial grid spec resolving a multibubble with the given centres.
GridSpec multibubble_grid_spec(const std::vector<BubbleParams>& params);

}  // namespace bubblelab
