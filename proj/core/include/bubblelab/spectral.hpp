#pragma once

// The weighted eigenproblem -Delta phi = nu U^{p-1} phi around the unit bubble
// U = v_1[0, 1], solved degree by degree with a C0 spectral-element method in
// the mapped radial variable, and Rayleigh-quotient checks of the gap.

#include <cstdint>
#include <map>
#include <vector>

#include "bubblelab/bubble.hpp"

namespace bubblelab {

/// Dimension of degree-l spherical harmonics on S^{n-1}.
long long harmonic_multiplicity(int n, int l);

struct SpectralOptions {
  int count = 6;               // eigenvalues kept per degree
  double cutoff_factor = 10.0;  // trusted eigenvalues lie below cutoff_factor * p
  double two_grid_tol = 1e-6;   // relative change allowed between resolutions
};

struct DegreeSpectrum {
  int l = 0;
  std::vector<double> values;         // fine grid, trusted, ascending
  std::vector<double> values_coarse;  // coarse grid, same count
  std::vector<std::string> labels;    // "U", "V", "W" or "" per value
  double max_rel_change = 0.0;
  bool converged = false;
};

struct SpectrumBand {
  double value = 0.0;
  long long multiplicity = 0;  // counted with harmonic multiplicities
  std::vector<int> degrees;
};

struct SpectrumResult {
  int n = 0;
  double p = 0.0;
  std::map<int, DegreeSpectrum> per_degree;
  std::vector<SpectrumBand> bands;  // distinct eigenvalues, ascending
  double Lambda = 0.0;  // smallest eigenvalue not carried by U, V, W
  bool gap_ok = false;  // Lambda > p
  bool extrapolation_ok = false;
};

/// Eigenvalues for degrees 0..lmax on `spec` and on the refined spec.
SpectrumResult weighted_spectrum(const Dimension& dim, int lmax, const GridSpec& spec = {},
                                 const SpectralOptions& opts = {});

struct Eigenpair {
  double value = 0.0;
  int l = 0;
  Eigen::VectorXd profile;  // radial profile sampled at the RadialGrid nodes
};

/// Lowest `count` eigenpairs of degree l, profiles sampled on `grid`, normalised
/// so that \int U^{p-1} phi^2 = 1 (with the degree-l harmonic norm).
std::vector<Eigenpair> weighted_eigenpairs(const RadialGrid& grid, int l, int count,
                                           const GridSpec& spec = {});

/// Centred unit-bubble basis U, V, W.
BubbleBasis unit_basis(std::shared_ptr<const RadialGrid> grid);

/// \int U^{p-1} rho^2 with U the centred unit bubble.
double weighted_mass(const ModalField& rho);
/// \int |grad rho|^2 / \int U^{p-1} rho^2.
double rayleigh_quotient(const ModalField& rho);
/// rho minus its Dirichlet projection onto span{U, V, W}.
ModalField orthogonalize(const ModalField& rho, const BubbleBasis& basis);

struct RayleighReport {
  std::vector<double> quotients;
  double min_quotient = 0.0;
};

/// Rayleigh quotients of the trials after orthogonalisation (or raw when
/// `project` is false). Throws InvalidArgument on a vanishing denominator.
RayleighReport rayleigh_gap_check(const std::vector<ModalField>& trials, const BubbleBasis& basis,
                                  bool project = true);

/// Smooth random fields g (2r/(1+r^2))^l sum_k c_k s^k per degree l <= lmax,
/// with g = (2/(1+r^2))^{(n-2)/2} and s = (r^2-1)/(r^2+1).
std::vector<ModalField> random_trial_fields(std::shared_ptr<const RadialGrid> grid, int count,
                                            std::uint64_t seed, int lmax = 3, int poly_degree = 6);

}  // namespace bubblelab
