#include <gtest/gtest.h>

#include <cmath>

#include "pucci/barriers.hpp"
#include "pucci/quadrature.hpp"

using namespace pucci;

TEST(Profile, ClosedFormValues) {
  // E0 = 1: phi(s) = ln(1/s) / ln 2
  EXPECT_NEAR(phi(1.0 / std::sqrt(2.0), {1.0, 1.0}, 2), 0.5, 1e-15);
  // E0 = 4: phi(s) = (s^-3 - 1) / 7
  EXPECT_NEAR(phi(0.75, {1.0, 2.0}, 3), 37.0 / 189.0, 1e-15);
  // E0 = 2: phi(s) = 1/s - 1
  EXPECT_NEAR(phi(0.8, {1.0, 2.0}, 2), 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(phi(0.5, {1.0, 2.0}, 3), 1.0);
  EXPECT_DOUBLE_EQ(phi(1.0, {1.0, 2.0}, 3), 0.0);
}

TEST(Profile, QuadratureMatchesClosedForms) {
  for (double E0 : {1.0, 2.0, 3.5, 4.0})
    for (int i = 0; i <= 20; ++i) {
      const double s = 0.5 + 0.025 * i;
      EXPECT_NEAR(phi_quadrature(s, E0, 0.0), phi_closed(s, E0), 1e-10) << E0 << " " << s;
    }
}

TEST(Profile, DriftProfileIsMonotone) {
  const EllipticityParams p{1.0, 2.0, 1.0};
  double prev = 1.0 + 1e-15;
  for (int i = 0; i <= 10; ++i) {
    const double v = phi(0.5 + 0.05 * i, p, 2);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_NEAR(phi(0.5, p, 2), 1.0, 1e-12);
  EXPECT_NEAR(phi(1.0, p, 2), 0.0, 1e-15);
}

TEST(Profile, OutsideRangeThrows) {
  EXPECT_THROW(phi(0.4, {1.0, 2.0}, 2), std::domain_error);
  EXPECT_THROW(phi(1.1, {1.0, 2.0}, 2), std::domain_error);
}

TEST(Homogeneous, DiscreteSolutionTracksProfile) {
  const EllipticityParams p{1.0, 2.0, 0.5};
  auto g = make_grid<2>(DomainDescriptor<2>::annulus(1.0), 1.0 / 32);
  DirichletProblem<2> prob{PucciSign::minus, p, g, constant_field<2>(g, 0.0), boundary_by_part<2>(g, 0.0, 1.0),
                           std::nullopt};
  const auto s = solve(prob);
  ASSERT_TRUE(s.converged);
  const auto exact = homogeneous_barrier_field<2>(p, 1.0, 1.0, g);
  double dev = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) dev = std::max(dev, std::abs(s.u[i] - exact[i]));
  EXPECT_LT(dev, 0.03);
  const auto geo = fit_distance_bounds(s.u, 1.0, BoundaryPart::outer_sphere);
  EXPECT_TRUE(geo.lower_positive);
  EXPECT_LE(geo.A_lower, geo.A_upper);
  EXPECT_GT(geo.nodes_used, 0u);
}

TEST(Homogeneous, ProfileFieldBounds) {
  // u/d = 1/(1-d) for phi = 1/s - 1: slope 1 at the outer sphere, 2 at the inner one
  const EllipticityParams p{1.0, 2.0};
  auto g = make_grid<2>(DomainDescriptor<2>::annulus(1.0), 1.0 / 16);
  const auto u = homogeneous_barrier_field<2>(p, 1.0, 1.0, g);
  const auto geo = fit_distance_bounds(u, 1.0, BoundaryPart::outer_sphere);
  EXPECT_GE(geo.A_lower, 1.0 - 1e-12);
  EXPECT_LE(geo.A_upper, 2.0 + 1e-12);
}

TEST(Inhomogeneous, LowerSlopeFallsLinearlyWithForcing) {
  const EllipticityParams p{1.0, 2.0, 0.5, 4.0};
  std::vector<double> norms, slopes;
  for (double a : {0.0, 1.0, 2.0}) {
    const auto b = inhomogeneous_barrier<2>(p, 1.0, 1.0, [&](const Point<2>&) { return a; }, BarrierKind::I, 1.0 / 16);
    norms.push_back(b.geometry.f_norm);
    slopes.push_back(b.geometry.lower_slope);
  }
  EXPECT_GT(slopes[0], slopes[1]);
  EXPECT_GT(slopes[1], slopes[2]);
  EXPECT_GE(fit_line(norms, slopes).r_squared, 0.95);
}

TEST(Inhomogeneous, KindTwoUsesInnerSphere) {
  const EllipticityParams p{1.0, 2.0};
  const auto b = inhomogeneous_barrier<2>(p, 1.0, 1.0, [](const Point<2>&) { return 0.0; }, BarrierKind::II, 1.0 / 16);
  EXPECT_TRUE(b.geometry.lower_positive);
  EXPECT_THROW(inhomogeneous_barrier<2>(p, -1.0, 1.0, [](const Point<2>&) { return 0.0; }, BarrierKind::I, 1.0 / 8),
               std::invalid_argument);
}

TEST(DistanceControl, ZeroDataAndInconsistency) {
  auto g = make_grid<2>(DomainDescriptor<2>::annulus(1.0), 1.0 / 8);
  const auto zero = constant_field<2>(g, 0.0);
  const auto r0 = control_by_distance_check(zero, zero, 4.0);
  EXPECT_EQ(r0.C, 0.0);
  EXPECT_FALSE(r0.inconsistent);
  const auto r1 = control_by_distance_check(constant_field<2>(g, 1.0), zero, 4.0);
  EXPECT_TRUE(r1.inconsistent);
  EXPECT_TRUE(std::isinf(r1.C));
}

TEST(DistanceControl, EnvelopeIsFiniteAndPositive) {
  const EllipticityParams p{1.0, 2.0, 0.5, 4.0};
  const auto env = control_by_distance_envelope<2>(p, 1.0, [](const Point<2>& x) { return 1.0 + x[0]; }, 1.0 / 16);
  EXPECT_FALSE(env.report.inconsistent);
  EXPECT_GT(env.report.C, 0.0);
  EXPECT_TRUE(std::isfinite(env.report.C));
}
