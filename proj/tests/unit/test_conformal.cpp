#include <gtest/gtest.h>

#include <cmath>

#include "bubblelab/bubble.hpp"
#include "bubblelab/conformal.hpp"
#include "bubblelab/functionals.hpp"

using namespace bubblelab;

TEST(Conformal, MapLandsOnTheSphere) {
  const StereographicMap F(Dimension(3));
  const auto y = F({0.3, -1.2, 2.0});
  ASSERT_EQ(y.size(), 4u);
  double s = 0.0;
  for (double c : y) s += c * c;
  EXPECT_NEAR(s, 1.0, 1e-15);
  EXPECT_NEAR(StereographicMap::sphere_coordinate(0.0), -1.0, 0.0);
  EXPECT_NEAR(StereographicMap::sphere_coordinate(1.0), 0.0, 1e-16);
  EXPECT_TRUE(std::isinf(StereographicMap::plane_radius(1.0)));
  for (double r : {0.01, 0.5, 3.0, 70.0})
    EXPECT_NEAR(StereographicMap::plane_radius(StereographicMap::sphere_coordinate(r)) / r, 1.0, 1e-12);
}

TEST(Conformal, StationaryBubbleMapsToConstant) {
  for (int n : {3, 4, 5}) {
    const Dimension d(n);
    const double expect = std::pow(n * (n - 2.0) / (n + 2.0), (n - 2.0) / 4.0);
    EXPECT_NEAR(stationary_constant(d), expect, 1e-15);
    auto grid = RadialGrid::make(d);
    const ModalField u = eval_bubble(grid, BubbleParams::centered(d, d.c_flow()));
    const ZonalSphereField v = plane_to_sphere(u, SphereGrid::make(d, 16));
    for (int i = 0; i < v.size(); ++i) EXPECT_NEAR(v.samples()(i), expect, 1e-10) << n;
  }
  EXPECT_NEAR(stationary_constant(Dimension(3)), 0.88011173679339339727, 1e-15);
  EXPECT_NEAR(stationary_constant(Dimension(4)), 1.154700538379251529, 1e-15);
  EXPECT_NEAR(stationary_constant(Dimension(5)), 1.7711074679558145457, 1e-15);
}

TEST(Conformal, SphereBubbleMatchesPlaneBubble) {
  const Dimension d(3);
  const StereographicMap F(d);
  for (double lambda : {0.5, 1.0, 2.5}) {
    for (double r : {0.0, 0.4, 2.0, 11.0}) {
      const double t = StereographicMap::sphere_coordinate(r);
      EXPECT_NEAR(F.conformal_factor(r) * sphere_bubble(d, 1.0, lambda, t),
                  bubble_value(d, 1.0, 0.0, lambda, 1.0, r, 1.0), 1e-14);
      const double h = 1e-6;
      EXPECT_NEAR(sphere_bubble_dlambda(d, 1.0, lambda, t),
                  (sphere_bubble(d, 1.0, lambda + h, t) - sphere_bubble(d, 1.0, lambda - h, t)) / (2 * h), 1e-8);
    }
  }
}

TEST(Conformal, MassAndEnergyAreInvariant) {
  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  auto sphere = SphereGrid::make(d, 64);
  const StereographicMap F(d);
  const std::vector<std::function<double(double, double)>> fields = {
      [&](double r, double) { return bubble_value(d, 1.0, 0.0, 0.7, 1.0, r, 1.0); },
      [&](double r, double) {
        const double t = StereographicMap::sphere_coordinate(r);
        return F.conformal_factor(r) * (1.0 + 0.3 * t);
      },
      [&](double r, double) {
        const double t = StereographicMap::sphere_coordinate(r);
        return F.conformal_factor(r) * (0.5 + 0.2 * t * t - 0.1 * t * t * t);
      },
  };
  for (const auto& f : fields) {
    const ModalField u = ModalField::sample(grid, 0, f);
    const ZonalSphereField v = plane_to_sphere(u, sphere);
    EXPECT_NEAR(mass(v) / mass(u), 1.0, 1e-8);
    EXPECT_NEAR(conformal_energy(v) / dirichlet(u), 1.0, 1e-6);
    const ModalField back = sphere_to_plane(v, grid);
    EXPECT_LT((back.profiles().col(0) - u.profiles().col(0)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Conformal, ConstantMapsToBubbleAndZeroToZero) {
  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  auto sphere = SphereGrid::make(d, 16);
  const ModalField u = sphere_to_plane(ZonalSphereField::constant(sphere, stationary_constant(d)), grid);
  const ModalField b = eval_bubble(grid, BubbleParams::centered(d, d.c_flow()));
  EXPECT_LT((u.profiles() - b.profiles()).cwiseAbs().maxCoeff(), 1e-12);
  const ModalField z = sphere_to_plane(ZonalSphereField::constant(sphere, 0.0), grid);
  EXPECT_EQ(z.profiles().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Conformal, RejectsNonRadialInput) {
  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  const ModalField u = eval_bubble(grid, BubbleParams::on_axis(d, 0.5));
  EXPECT_THROW(plane_to_sphere(u, SphereGrid::make(d, 16)), InvalidArgument);
}

TEST(Conformal, UnderresolvedSphereFieldIsFlagged) {
  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  const ModalField u = eval_bubble(grid, BubbleParams::centered(d, 1.0, 40.0));
  EXPECT_THROW(plane_to_sphere(u, SphereGrid::make(d, 8)), Unresolved);
}
