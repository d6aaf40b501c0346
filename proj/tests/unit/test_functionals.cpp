#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bubblelab/bubble.hpp"
#include "bubblelab/functionals.hpp"

using namespace bubblelab;

TEST(Functionals, BubbleHasCurvatureKappaAndZeroDeficit) {
  for (int n : {3, 4, 5}) {
    const Dimension d(n);
    auto grid = RadialGrid::make(d);
    for (double kappa : {1.0, d.c_flow(), 2.0}) {
      const ModalField u = eval_bubble(grid, BubbleParams::centered(d, kappa, 0.7));
      EXPECT_NEAR(k0(u), kappa, 1e-10) << n;
      EXPECT_LT(deficit(u), 1e-8) << n << " " << kappa;
    }
  }
}

TEST(Functionals, ModalAndPhysicalDirichletAgree) {
  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  const ModalField u = eval_bubble(grid, BubbleParams::on_axis(d, 0.8, 1.0, 1.3), 1e-11);
  EXPECT_GT(u.lmax(), 2);
  EXPECT_NEAR(dirichlet(u) / dirichlet_physical(u), 1.0, 1e-9);
  EXPECT_NEAR(dirichlet_inner(u, u), dirichlet(u), 1e-12 * dirichlet(u));
}

TEST(Functionals, StationaryEnergyMatchesBothRepresentations) {
  for (int n : {3, 4, 5}) {
    const Dimension d(n);
    const double js = stationary_energy(d);
    auto grid = RadialGrid::make(d);
    const ModalField w = eval_bubble(grid, BubbleParams::centered(d, d.c_flow()));
    EXPECT_NEAR(flow_energy_J(w) / js, 1.0, 1e-10) << n;
    EXPECT_NEAR(dissipation(w), 0.0, 1e-10) << n;
    const auto sphere = SphereGrid::make(d, 16);
    const double c = std::pow(n * (n - 2.0) / (n + 2.0), (n - 2.0) / 4.0);
    const ZonalSphereField v = ZonalSphereField::constant(sphere, c);
    EXPECT_NEAR(flow_energy_J(v) / js, 1.0, 1e-12) << n;
    EXPECT_NEAR(dissipation(v), 0.0, 1e-20);
    EXPECT_NEAR(deficit(v), 0.0, 1e-12);
    EXPECT_NEAR(energy_gap_I(v, js), 0.0, 1e-12);
  }
}

TEST(Functionals, PerturbedBubbleAgainstQuadratureOracle) {
  // K0 - 1 and delta from mpmath quadrature, tests/oracles/oracles.py
  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  const struct {
    double eps, k0m1, delta;
  } cases[] = {{1e-2, -0.00465131804145, 0.087599600476401},
               {1e-3, -0.000464019010709, 0.0087777596806615},
               {1e-4, -4.63908399225e-5, 0.00087795451143327}};
  for (const auto& c : cases) {
    const PerturbedBubble pb = make_perturbed_bubble(cap_profile(grid), c.eps);
    EXPECT_NEAR((k0(pb.u) - 1.0) / c.k0m1, 1.0, 1e-7) << c.eps;
    // |K - K0|^q has a kink where K crosses K0, so quadrature converges algebraically
    EXPECT_NEAR(deficit(pb.u, &pb.K) / c.delta, 1.0, 1e-4) << c.eps;
    EXPECT_NEAR(deficit(pb.u) / c.delta, 1.0, 1e-4) << c.eps;
  }
}

TEST(Functionals, TwoBubblesAgainstQuadratureOracle) {
  const Dimension d(3);
  const struct {
    double sep, k0, delta;
  } cases[] = {{10.0, 0.4196450598, 4.8445137115}, {20.0, 0.6416134273, 2.6631549205}, {40.0, 0.8035461144, 1.2887974113}};
  for (const auto& c : cases) {
    const auto params = two_bubble_params(d, c.sep);
    auto grid = RadialGrid::make(d, multibubble_grid_spec(params));
    const MultiBubble mb = make_multibubble(grid, params);
    EXPECT_NEAR(k0(mb.u), c.k0, 1e-8) << c.sep;
    EXPECT_NEAR(deficit(mb.u, &mb.K) / c.delta, 1.0, 1e-4) << c.sep;
  }
}

TEST(Functionals, ReportIsConsistent) {
  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  const ModalField u = eval_bubble(grid, BubbleParams::centered(d, 2.0));
  const FunctionalReport r = functional_report(u, nullptr, 0.5);
  EXPECT_DOUBLE_EQ(r.dirichlet, dirichlet(u));
  EXPECT_DOUBLE_EQ(r.mass, mass(u));
  EXPECT_NEAR(r.K0, 2.0, 1e-10);
  ASSERT_TRUE(r.I.has_value());
  EXPECT_DOUBLE_EQ(*r.I, r.J - 0.5);
}

TEST(Functionals, NegativeFieldIsRejected) {
  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  const ModalField u = -1.0 * eval_bubble(grid, BubbleParams::centered(d));
  EXPECT_THROW(mass(u), NonPositiveField);
  EXPECT_GT(critical_norm_power(u), 0.0);
}

TEST(Functionals, DeficitBoundedByDissipationOnRandomFields) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coef(-0.3, 0.3);
  for (int n : {3, 4, 5}) {
    const Dimension d(n);
    const auto sphere = SphereGrid::make(d, 32);
    for (int trial = 0; trial < 20; ++trial) {
      const double a = coef(rng), b = coef(rng), c = coef(rng);
      const double scale = 0.5 + std::abs(coef(rng)) * 3;
      const ZonalSphereField v =
          ZonalSphereField::sample(sphere, [&](double t) { return scale * (1.0 + a * t + b * t * t + c * t * t * t); });
      const double delta = deficit(v);
      EXPECT_LE(delta * delta, delta_bound_rhs(v) * (1 + 1e-12)) << n << " " << trial;
      EXPECT_NEAR(k0(v), conformal_energy(v) / mass(v), 1e-12 * k0(v));
    }
  }
}
