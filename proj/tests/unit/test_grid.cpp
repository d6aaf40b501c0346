#include <gtest/gtest.h>

#include <cmath>

#include "bubblelab/grid.hpp"

using namespace bubblelab;

TEST(GaussJacobi, LegendreIsExactForPolynomials) {
  const GaussRule g = gauss_legendre(10);
  for (int k = 0; k <= 19; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
    const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
    EXPECT_NEAR(s, exact, 1e-14) << k;
  }
}

TEST(GaussJacobi, SymmetricWeightMatchesBetaFunction) {
  // \int (1-t^2)^a t^2 dt = B(3/2, a+1)
  for (double a : {0.0, 0.5, 1.5, 2.0}) {
    const GaussRule g = gauss_jacobi(12, a, a);
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * g.nodes[i] * g.nodes[i];
    EXPECT_NEAR(s, std::beta(1.5, a + 1.0), 1e-14) << a;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      EXPECT_NEAR(g.nodes[i], -g.nodes[g.nodes.size() - 1 - i], 1e-15);
  }
}

TEST(GaussJacobi, RejectsBadArguments) {
  EXPECT_THROW(gauss_jacobi(0, 0.0, 0.0), InvalidArgument);
  EXPECT_THROW(gauss_jacobi(4, -1.0, 0.0), InvalidArgument);
}

TEST(Differentiation, ExactOnPolynomials) {
  const GaussRule g = gauss_legendre(8);
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(g.nodes.data(), 8);
  const Eigen::MatrixXd D = differentiation_matrix(x);
  const Eigen::VectorXd f = x.array().pow(5) - 2.0 * x.array().square();
  const Eigen::VectorXd df = 5.0 * x.array().pow(4) - 4.0 * x.array();
  EXPECT_LT((D * f - df).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::VectorXd w = barycentric_weights(x);
  EXPECT_NEAR(barycentric_interpolate(x, w, f, 0.3), std::pow(0.3, 5) - 0.18, 1e-14);
}

class RadialBeta : public ::testing::TestWithParam<int> {};

TEST_P(RadialBeta, BubbleDensityMatchesBetaOracle) {
  // \int_0^inf r^{n-1} (1+r^2)^{-n} dr = B(n/2, n/2) / 2
  const int n = GetParam();
  const Dimension d(n);
  auto grid = RadialGrid::make(d);
  const Eigen::VectorXd r = grid->r();
  const Eigen::VectorXd f = (1.0 + r.array().square()).pow(-n);
  const double got = grid->weights().dot(f);
  const double exact = 0.5 * std::beta(0.5 * n, 0.5 * n);
  EXPECT_NEAR(got / exact, 1.0, 1e-13);
  EXPECT_NEAR(grid->integral(f) / (exact * Dimension::sphere_area(n - 1)), 1.0, 1e-13);
}

INSTANTIATE_TEST_SUITE_P(Dims, RadialBeta, ::testing::Values(3, 4, 5, 6));

TEST(RadialGrid, ModeLaplacianOfBubbleProfile) {
  // Delta (1+r^2)^{-1/2} = -3 (1+r^2)^{-5/2} in R^3
  const Dimension d(3);
  auto grid = RadialGrid::make(d);
  const Eigen::ArrayXd q = 1.0 + grid->r().array().square();
  const Eigen::VectorXd f = q.pow(-0.5);
  const Eigen::VectorXd lap = grid->mode_laplacian(f, 0);
  const Eigen::VectorXd exact = -3.0 * q.pow(-2.5);
  EXPECT_LT((lap - exact).cwiseAbs().maxCoeff(), 1e-7);
  const Eigen::VectorXd rel = (lap - exact).cwiseQuotient(exact);
  for (int i = 0; i < grid->size(); ++i)
    if (grid->r()(i) < 100.0) EXPECT_LT(std::abs(rel(i)), 1e-8) << grid->r()(i);
}

TEST(RadialGrid, DerivativeAndInterpolation) {
  const Dimension d(4);
  auto grid = RadialGrid::make(d);
  const Eigen::ArrayXd r = grid->r().array();
  const Eigen::VectorXd f = (-r.square()).exp();
  const Eigen::VectorXd df = grid->derivative(f);
  EXPECT_LT((df.array() + 2.0 * r * (-r.square()).exp()).abs().maxCoeff(), 1e-9);
  for (double x : {0.0, 0.37, 1.5, 4.0}) EXPECT_NEAR(grid->interpolate(f, x), std::exp(-x * x), 1e-12) << x;
  EXPECT_LT(grid->resolution_tail(f), 1e-10);
}

TEST(RadialGrid, SpecEqualityAndRefinement) {
  const Dimension d(3);
  auto a = RadialGrid::make(d, {1.0, 16, 8});
  auto b = RadialGrid::make(d, {1.0, 16, 8});
  EXPECT_TRUE(a->same_as(*b));
  EXPECT_EQ(a->refined_spec().panels, 32);
  EXPECT_EQ(a->size(), 128);
  EXPECT_THROW(RadialGrid::make(d, {-1.0, 16, 8}), InvalidArgument);
  EXPECT_THROW(RadialGrid::make(d, {1.0, 0, 8}), InvalidArgument);
}

class SphereDims : public ::testing::TestWithParam<int> {};

TEST_P(SphereDims, TotalWeightIsSphereArea) {
  const int n = GetParam();
  auto s = SphereGrid::make(Dimension(n), 24);
  EXPECT_NEAR(s->weights().sum() / Dimension::sphere_area(n), 1.0, 1e-14);
}

TEST_P(SphereDims, ZonalHarmonicsAreLaplaceEigenfunctions) {
  const int n = GetParam();
  auto s = SphereGrid::make(Dimension(n), 24);
  for (int k = 0; k <= 6; ++k) {
    Eigen::VectorXd pk(s->size());
    std::vector<double> vals(k + 1);
    for (int j = 0; j < s->size(); ++j) {
      zonal_polynomials(n + 1, k, s->t()(j), vals.data());
      pk(j) = vals[k];
    }
    const Eigen::VectorXd lap = s->laplacian() * pk;
    EXPECT_LT((lap + k * (k + n - 1.0) * pk).cwiseAbs().maxCoeff(), 1e-9 * (1 + k * k)) << n << " " << k;
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, SphereDims, ::testing::Values(3, 4, 5, 6));

TEST(ZonalPolynomials, NormalizedAtThePole) {
  std::vector<double> v(8), dv(8);
  zonal_polynomials(3, 7, 1.0, v.data(), dv.data());
  for (int l = 0; l <= 7; ++l) {
    EXPECT_NEAR(v[l], 1.0, 1e-14);
    EXPECT_NEAR(dv[l], l * (l + 1) / 2.0, 1e-12);  // Legendre: P_l'(1) = l(l+1)/2
  }
}

TEST(AngularRule, HarmonicsAreOrthogonalWithTabulatedNorms) {
  const Dimension d(3);
  const AngularRule rule(d, 6, 20);
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 6; ++b) {
      const double s = (rule.weights().array() * rule.harmonics().col(a).array() * rule.harmonics().col(b).array()).sum();
      const double expect = a == b ? rule.norms()(a) : 0.0;
      EXPECT_NEAR(s, expect, 1e-13) << a << " " << b;
    }
  // Legendre on S^2: \int P_l^2 = 4 pi / (2l + 1)
  for (int l = 0; l <= 6; ++l) EXPECT_NEAR(rule.norms()(l), 4.0 * M_PI / (2 * l + 1), 1e-13);
  EXPECT_EQ(AngularRule::default_nodes(0), 1);
}
