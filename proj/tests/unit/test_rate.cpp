#include <gtest/gtest.h>

#include <cmath>

#include "bubblelab/bubble.hpp"
#include "bubblelab/rate.hpp"

using namespace bubblelab;

TEST(ExponentialFit, RecoversSyntheticRate) {
  std::vector<double> s, v;
  for (int i = 0; i <= 50; ++i) {
    s.push_back(0.1 * i);
    v.push_back(3.0 * std::exp(-2.0 * s.back()));
  }
  const ExponentialFit f = fit_exponential(s, v, 0.0, 5.0);
  EXPECT_NEAR(f.rate, 2.0, 1e-10);
  EXPECT_NEAR(f.prefactor, 3.0, 1e-10);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  EXPECT_EQ(f.samples, 51);
  const ExponentialFit g = fit_exponential(s, v, 1.0, 2.0);
  EXPECT_EQ(g.samples, 11);
  EXPECT_NEAR(g.rate, 2.0, 1e-10);
}

TEST(ExponentialFit, RejectsBadInput) {
  std::vector<double> s, v;
  for (int i = 0; i < 20; ++i) {
    s.push_back(i);
    v.push_back(1.0 - 0.1 * i);
  }
  EXPECT_THROW(fit_exponential(s, v, 0.0, 19.0), InvalidArgument);
  EXPECT_THROW(fit_exponential(s, v, 0.0, 5.0), InvalidArgument);
}

TEST(Rate, EnergyInnerOfSphereBubbleIsSobolevPower) {
  const Dimension d(3);
  auto sphere = SphereGrid::make(d, 32);
  for (double lambda : {1.0, 1.5}) {
    const ZonalSphereField b = sphere_bubble_field(sphere, 1.0, lambda);
    EXPECT_NEAR(energy_inner(b, b) / sobolev_power(d), 1.0, 1e-10);
  }
}

TEST(Rate, ZonalFitRecoversScaleAndAmplitude) {
  const Dimension d(3);
  auto sphere = SphereGrid::make(d, 32);
  const ZonalFit f = fit_zonal_bubble(sphere_bubble_field(sphere, 1.0, 0.6, 1.3), 1.0, true);
  EXPECT_TRUE(f.converged);
  EXPECT_NEAR(f.lambda, 0.6, 1e-8);
  EXPECT_NEAR(f.amplitude, 1.3, 1e-8);
  const ZonalFit g = fit_zonal_bubble(sphere_bubble_field(sphere, d.c_flow(), 1.7), d.c_flow(), false);
  EXPECT_NEAR(g.lambda, 1.7, 1e-8);
  EXPECT_NEAR(g.amplitude, 1.0, 0.0);
}

TEST(Rate, StationaryStateIsItsOwnProjection) {
  const Dimension d(3);
  auto sphere = SphereGrid::make(d, 32);
  const ZonalSphereField w = ZonalSphereField::constant(sphere, stationary_constant(d));
  const NearestStationary ns = nearest_stationary(w);
  EXPECT_TRUE(ns.converged);
  EXPECT_NEAR(ns.lambda, 1.0, 1e-8);
  EXPECT_LT(ns.rho_h1, 1e-8);
  const RenormalizedProfile rp = renormalized_profile(w);
  EXPECT_NEAR(rp.K0, d.c_flow(), 1e-12);
  EXPECT_NEAR(rp.alpha, 1.0, 1e-10);
  EXPECT_LT(rp.distance, 1e-8);
  EXPECT_LT(weighted_sup_residual(w), 1e-8);
}

TEST(Rate, NearestStationaryIsOrthogonalInScale) {
  const Dimension d(3);
  auto sphere = SphereGrid::make(d, 32);
  const double c = stationary_constant(d);
  const ZonalSphereField w = ZonalSphereField::sample(sphere, [&](double t) { return c * (1.0 + 0.05 * t + 0.02 * t * t); });
  const NearestStationary ns = nearest_stationary(w);
  EXPECT_TRUE(ns.converged);
  EXPECT_LT(std::abs(ns.orth_lambda), 1e-8);
  EXPECT_GT(ns.rho_h1, 0.0);
  EXPECT_NEAR(ns.rho_ratio, ns.rho_h1 / std::sqrt(energy_inner(w, w)), 1e-12);
}

class CalibratedRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    FlowConfig c;
    c.s_end = 8.0;
    c.calibration = CalibrationConfig{true, 0.9, 1.1, 1e-10, 80};
    result_ = new CalibrationResult(calibrate_amplitude(c));
    report_ = new RateReport(analyze(result_->trajectory));
  }
  static void TearDownTestSuite() {
    delete report_;
    delete result_;
  }
  static CalibrationResult* result_;
  static RateReport* report_;
};

CalibrationResult* CalibratedRun::result_ = nullptr;
RateReport* CalibratedRun::report_ = nullptr;

TEST_F(CalibratedRun, EnergyGapDecaysExponentially) {
  const RateReport& r = *report_;
  ASSERT_TRUE(r.applicable) << r.reason;
  EXPECT_GE(r.samples, 10);
  EXPECT_GE(r.r2, 0.99);
  EXPECT_GT(r.kappaFit, 0.0);
  // linearization about the constant: the slowest admissible mode gives 10/3
  EXPECT_NEAR(r.kappaFit, 10.0 / 3.0, 0.05);
  EXPECT_NEAR(r.kappaRho, 10.0 / 3.0, 0.05);
  EXPECT_LT(r.half_window_change, 0.05);
}

TEST_F(CalibratedRun, GapOverResidualStaysInBand) {
  const RateReport& r = *report_;
  ASSERT_TRUE(r.applicable) << r.reason;
  EXPECT_TRUE(r.ratio_ok);
  EXPECT_GE(r.ratio_min, 0.1);
  EXPECT_LE(r.ratio_max, 10.0);
  EXPECT_NEAR(r.ratio_max, 2.0 / 7.0, 0.01);
}

TEST_F(CalibratedRun, CauchyTailAndWeightedSup) {
  const RateReport& r = *report_;
  ASSERT_TRUE(r.applicable) << r.reason;
  EXPECT_TRUE(r.cauchy.pass) << r.cauchy.reason;
  EXPECT_TRUE(std::isfinite(r.cauchy.constant));
  EXPECT_TRUE(r.cauchy.blocks_ok);
  EXPECT_TRUE(r.cauchy.tail_ok);
  EXPECT_GT(r.theta_fit.rate, 0.0);
  EXPECT_GE(r.theta_fit.r2, 0.99);
  EXPECT_TRUE(r.delta_bound_ok);
  EXPECT_LT(r.orth_max, 1e-6);
}

TEST_F(CalibratedRun, WindowIsInsideTheTrajectory) {
  const RateReport& r = *report_;
  ASSERT_TRUE(r.applicable) << r.reason;
  EXPECT_LE(0.0, r.s_a);
  EXPECT_LT(r.s_a, r.s_b);
  EXPECT_LE(r.s_b, result_->trajectory.last().s);
  EXPECT_EQ(r.theta_s.size(), r.theta_sup.size());
  EXPECT_GT(r.mass_min, 0.0);
}

TEST(Rate, UncalibratedRunFailsTheBand) {
  FlowConfig c;
  c.s_end = 2.0;
  const RateReport r = analyze(run(c));
  EXPECT_FALSE(r.applicable && r.ratio_ok && r.kappaFit > 0 && std::abs(r.kappaFit - 10.0 / 3.0) < 0.05);
}
