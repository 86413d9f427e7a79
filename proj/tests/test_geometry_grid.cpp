#include <gtest/gtest.h>

#include <cmath>

#include "pucci/grid.hpp"

using namespace pucci;

TEST(Domain, SignedDistanceAndParts) {
  const auto ball = DomainDescriptor<2>::ball(1.0);
  EXPECT_DOUBLE_EQ(ball.signed_distance({0.0, 0.0}), 1.0);
  EXPECT_NEAR(ball.signed_distance({0.0, 1.5}), -0.5, 1e-15);

  const auto ann = DomainDescriptor<2>::annulus(1.0);
  EXPECT_DOUBLE_EQ(ann.inner_radius(), 0.5);
  EXPECT_FALSE(ann.contains({0.1, 0.0}));
  EXPECT_NEAR(dist_to_part<2>({0.75, 0.0}, ann, BoundaryPart::outer_sphere), 0.25, 1e-15);
  EXPECT_NEAR(dist_to_part<2>({0.75, 0.0}, ann, BoundaryPart::inner_sphere), 0.25, 1e-15);

  const auto half = DomainDescriptor<3>::half_ball(1.0);
  EXPECT_TRUE(half.contains({0.0, 0.0, 0.5}));
  EXPECT_FALSE(half.contains({0.0, 0.0, -0.1}));
  EXPECT_NEAR(dist_to_part<3>({0.1, 0.2, 0.3}, half, BoundaryPart::flat), 0.3, 1e-15);
}

TEST(Domain, RejectsBadRadius) {
  EXPECT_THROW(DomainDescriptor<2>::ball(0.0), std::invalid_argument);
  EXPECT_THROW(DomainDescriptor<2>::ball(-1.0), std::invalid_argument);
}

TEST(Grid, HalfBallTagsFlatNodes) {
  auto g = make_grid<2>(DomainDescriptor<2>::half_ball(1.0), 1.0 / 8);
  std::size_t flat = 0, curved = 0, interior = 0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto& nd = g->node(i);
    if (nd.tag == NodeTag::flat_boundary) {
      ++flat;
      EXPECT_NEAR(nd.x[1], 0.0, 1e-12);
    } else if (nd.tag == NodeTag::dirichlet_boundary) {
      ++curved;
    } else {
      ++interior;
      EXPECT_GT(nd.x[1], 0.0);
    }
  }
  EXPECT_GT(flat, 0u);
  EXPECT_GT(curved, 0u);
  EXPECT_EQ(interior, g->interior_count());
}

TEST(Grid, AnnulusHasBothSpheres) {
  auto g = make_grid<2>(DomainDescriptor<2>::annulus(1.0), 1.0 / 8);
  bool inner = false, outer = false;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto& nd = g->node(i);
    if (nd.tag == NodeTag::interior) continue;
    const double r = norm<2>(nd.x);
    if (nd.part == BoundaryPart::inner_sphere) {
      inner = true;
      EXPECT_NEAR(r, 0.5, 1e-9);
    }
    if (nd.part == BoundaryPart::outer_sphere) {
      outer = true;
      EXPECT_NEAR(r, 1.0, 1e-9);
    }
  }
  EXPECT_TRUE(inner && outer);
}

TEST(Grid, RejectsSpacingLargerThanDomain) {
  EXPECT_THROW(make_grid<2>(DomainDescriptor<2>::ball(1.0), 2.0), std::invalid_argument);
  EXPECT_THROW(make_grid<2>(DomainDescriptor<2>::ball(1.0), 0.0), std::invalid_argument);
}

TEST(Field, InterpolationIsExactForBilinear) {
  auto g = make_grid<2>(DomainDescriptor<2>::ball(1.0), 1.0 / 16);
  auto f = sample<2>(g, [](const Point<2>& x) { return 1.0 + 2.0 * x[0] - 3.0 * x[1] + x[0] * x[1]; });
  for (Point<2> p : {Point<2>{0.1234, -0.3}, Point<2>{-0.41, 0.05}, Point<2>{0.0, 0.0}}) {
    const auto v = interpolate<2>(f, p);
    ASSERT_TRUE(v.has_value());
    EXPECT_NEAR(*v, 1.0 + 2.0 * p[0] - 3.0 * p[1] + p[0] * p[1], 1e-12);
  }
  EXPECT_FALSE(interpolate<2>(f, Point<2>{2.0, 0.0}).has_value());
}

TEST(Field, LqNormOfConstantOnDisk) {
  auto g = make_grid<2>(DomainDescriptor<2>::ball(1.0), 1.0 / 32);
  const auto one = constant_field<2>(g, 1.0);
  // ||1||_{L^2(B_1)} = sqrt(pi)
  EXPECT_NEAR(lq_norm(one, 2.0), std::sqrt(M_PI), 2e-2);
  EXPECT_DOUBLE_EQ(one.sup_norm(), 1.0);
}

TEST(Field, RescaleCarriesFactors) {
  auto g = make_grid<2>(DomainDescriptor<2>::ball(1.0), 1.0 / 8);
  auto u = sample<2>(g, [](const Point<2>& x) { return x[0] * x[0] + x[1]; });
  const auto r = rescale_field(u, 3.0, 0.5);
  EXPECT_DOUBLE_EQ(r.info.rhs_factor, 3.0 * 0.25);
  EXPECT_DOUBLE_EQ(r.info.drift_factor, 0.5);
  EXPECT_DOUBLE_EQ(r.field.grid().domain().outer_radius(), 2.0);
  // v(x) = 3 u(x/2) at the node images
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto& y = r.field.grid().node(i).x;
    EXPECT_NEAR(r.field[i], 3.0 * (0.25 * y[0] * y[0] + 0.5 * y[1]), 1e-12);
  }
  EXPECT_THROW(rescale_field(u, 1.0, 0.0), std::invalid_argument);
}

TEST(Params, Validation) {
  EllipticityParams p{1.0, 2.0, 0.5, 4.0};
  EXPECT_NO_THROW(p.validate(2));
  EXPECT_THROW((EllipticityParams{2.0, 1.0}).validate(2), std::invalid_argument);
  EXPECT_THROW((EllipticityParams{1.0, 1.0, -1.0}).validate(2), std::invalid_argument);
  EXPECT_THROW((EllipticityParams{1.0, 1.0, 0.0, 3.0}).validate(3), std::invalid_argument);
}
