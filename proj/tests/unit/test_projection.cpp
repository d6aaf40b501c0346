#include <gtest/gtest.h>

#include <cmath>

#include "bubblelab/bubble.hpp"
#include "bubblelab/functionals.hpp"
#include "bubblelab/projection.hpp"

using namespace bubblelab;

TEST(Projection, RecoversCentredBubble) {
  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  const ProjectionResult r = project_to_bubble(eval_bubble(grid, BubbleParams::centered(d, 1.0, 0.6, 0.9)));
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.params.scale, 0.6, 1e-9);
  EXPECT_NEAR(r.params.amplitude, 0.9, 1e-9);
  EXPECT_NEAR(r.axial_center, 0.0, 1e-9);
  EXPECT_LT(r.rhoH1, 1e-8);
}

TEST(Projection, RecoversOffCentreBubble) {
  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  const ProjectionResult r = project_to_bubble(eval_bubble(grid, BubbleParams::on_axis(d, 0.3, 1.0, 1.7, 1.2), 1e-11));
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.axial_center, 0.3, 1e-8);
  EXPECT_NEAR(r.params.scale, 1.7, 1e-8);
  EXPECT_NEAR(r.params.amplitude, 1.2, 1e-8);
  EXPECT_LT(r.rhoH1, 1e-8);
}

TEST(Projection, KappaBubbleIsRescaledUnitBubble) {
  const Dimension d(4);
  auto grid = RadialGrid::make(d);
  const ProjectionResult r = project_to_bubble(eval_bubble(grid, BubbleParams::centered(d, 2.0)));
  // v_2 = 2^{-(n-2)/4} v_1
  EXPECT_NEAR(r.params.amplitude, std::pow(2.0, -0.5), 1e-9);
  EXPECT_NEAR(r.params.scale, 1.0, 1e-9);
}

TEST(Projection, ResidualIsOrthogonalToTangentSpace) {
  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  const PerturbedBubble pb = make_perturbed_bubble(cap_profile(grid), 1e-2);
  ProjectionOptions o;
  o.K = &pb.K;
  const ProjectionResult r = project_to_bubble(pb.u, o);
  for (double x : r.ortho_residuals) EXPECT_LT(std::abs(x), 1e-8);
  EXPECT_NEAR(r.rhoH1 / r.rhoH1_physical, 1.0, 1e-6);
  EXPECT_FALSE(r.guard_warning);
}

TEST(Projection, NormalizationGivesUnitK0) {
  const Dimension d(5);
  auto grid = RadialGrid::make(d);
  const ModalField u = eval_bubble(grid, BubbleParams::centered(d, 1.8, 1.3));
  EXPECT_NEAR(k0(normalize_k0(u)), 1.0, 1e-10);
  EXPECT_NEAR(normalization_factor(u), std::pow(1.8, 1.0 / (d.two_star() - 2.0)), 1e-10);
}

TEST(Stability, ExactBubbleHasNoRatio) {
  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  const StabilityReport r = stability_check(eval_bubble(grid, BubbleParams::centered(d)));
  EXPECT_TRUE(r.K0_ok);
  EXPECT_TRUE(r.energy_ok);
  EXPECT_LT(r.delta, 1e-8);
  EXPECT_FALSE(r.C_ratio.has_value());
  EXPECT_LT(r.rho_prime_h1, 1e-8);
}

TEST(Stability, PerturbedFamilyHasUniformConstants) {
  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  double cmin = 1e300, cmax = 0, emin = 1e300, emax = 0, kmin = 1e300, kmax = 0;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const PerturbedBubble pb = make_perturbed_bubble(cap_profile(grid), eps);
    StabilityOptions o;
    o.projection.K = &pb.K;
    const StabilityReport r = stability_check(pb.u, o);
    ASSERT_TRUE(r.K0_ok && r.energy_ok);
    ASSERT_TRUE(r.C_ratio && r.alpha_K);
    cmin = std::min(cmin, *r.C_ratio), cmax = std::max(cmax, *r.C_ratio);
    emin = std::min(emin, r.delta / eps), emax = std::max(emax, r.delta / eps);
    kmin = std::min(kmin, *r.alpha_K), kmax = std::max(kmax, *r.alpha_K);
  }
  EXPECT_LT(emax / emin, 1.5);
  EXPECT_LT(cmax / cmin, 2.0);
  EXPECT_LT(kmax / kmin, 2.0);
  // measured on the default grid
  EXPECT_NEAR(cmin, 0.1675, 2e-3);
  EXPECT_NEAR(emin, 8.75, 0.05);
}

TEST(Stability, TwoBubblesViolateEnergyHypothesis) {
  const Dimension d(3);
  const double s_half = std::sqrt(sobolev_power(d));
  double prev_delta = 1e300;
  for (double sep : {10.0, 20.0}) {
    const auto params = two_bubble_params(d, sep);
    auto grid = RadialGrid::make(d, multibubble_grid_spec(params));
    const MultiBubble mb = make_multibubble(grid, params);
    StabilityOptions o;
    o.projection.K = &mb.K;
    const StabilityReport r = stability_check(mb.u, o);
    EXPECT_FALSE(r.energy_ok) << sep;
    EXPECT_GT(r.energy_ratio, 1.5);
    const double delta = deficit(mb.u, &mb.K);
    EXPECT_LT(delta, prev_delta);
    prev_delta = delta;
    const ProjectionResult pr = project_to_bubble(mb.u, o.projection);
    EXPECT_GE(pr.rhoH1, 0.5 * s_half) << sep;
  }
}
