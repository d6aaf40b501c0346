#pragma once

// Scalar functionals on R^n (ModalField) and on S^n (ZonalSphereField):
// Dirichlet energy, critical mass, K0, deficit, the flow energy J and the
// energy gap I, plus the dissipation of the rescaled flow.

#include <optional>

#include "bubblelab/field.hpp"

namespace bubblelab {

struct FunctionalReport {
  double dirichlet = 0.0;
  double mass = 0.0;
  double K0 = 0.0;
  double delta = 0.0;
  double J = 0.0;
  std::optional<double> I;
};

/// Angular rule used for nonlinear integrands of fields up to degree lmax.
std::shared_ptr<const AngularRule> integration_rule(const Dimension& dim, int lmax);

/// \int |grad u|^2 from the modal form sum_l N_l \int (f_l'^2 + l(l+n-2) f_l^2 / r^2).
double dirichlet(const ModalField& u);
/// \int grad a . grad b, modal form.
double dirichlet_inner(const ModalField& a, const ModalField& b);
/// \int |grad u|^2 from u_r^2 + (1-t^2) u_t^2 / r^2 on the tensor grid.
double dirichlet_physical(const ModalField& u);
/// \int u^{2*}; u must be positive on the tensor grid.
double mass(const ModalField& u);
/// \int |u|^{2*}.
double critical_norm_power(const ModalField& u);
double k0(const ModalField& u);
/// Delta u degree by degree.
ModalField laplacian(const ModalField& u);
/// ||K u^p - K0(u) u^p||_{L^{2n/(n+2)}}; without K, uses Delta u + K0 u^p.
double deficit(const ModalField& u, const ModalField* K = nullptr);
double flow_energy_J(const ModalField& w);
/// \int (Delta w / w^p + cFlow)^2 w^{2*}.
double dissipation(const ModalField& w);
double energy_gap_I(const ModalField& w, double j_reference);
FunctionalReport functional_report(const ModalField& u, const ModalField* K = nullptr,
                                   std::optional<double> j_reference = std::nullopt);

/// J of the stationary profiles v_{cFlow}[z, lambda]: S^n cFlow^{-(n-2)/2} (1/2 - 1/2*).
double stationary_energy(const Dimension& dim);

// Sphere versions. The energy is the conformal one, \int |grad v|^2 + n(n-2)/4 v^2.
double conformal_energy(const ZonalSphereField& v);
double mass(const ZonalSphereField& v);
double k0(const ZonalSphereField& v);
/// ||Delta_S v - n(n-2)/4 v + K0 v^p||_{L^{2n/(n+2)}(S^n)}, equal to the planar deficit.
double deficit(const ZonalSphereField& v);
double flow_energy_J(const ZonalSphereField& v);
double energy_gap_I(const ZonalSphereField& v, double j_reference);
/// \int ((Delta_S v - n(n-2)/4 v) / v^p + cFlow)^2 v^{2*}.
double dissipation(const ZonalSphereField& v);
/// (\int v^{2*})^{2/n} times the dissipation: the upper bound for delta^2.
double delta_bound_rhs(const ZonalSphereField& v);
FunctionalReport functional_report(const ZonalSphereField& v, std::optional<double> j_reference = std::nullopt);

}  // namespace bubblelab
