#include <gtest/gtest.h>

#include <random>

#include "pucci/properties.hpp"
#include "pucci/pucci_ops.hpp"

using namespace pucci;

TEST(Pucci, EigenvalueFormulaOnDiagonal) {
  const auto M = SymMatrix::diagonal({1.0, -2.0});
  const EllipticityParams p{1.0, 2.0};
  // M^- = lambda * 1 + Lambda * (-2), M^+ = Lambda * 1 + lambda * (-2)
  EXPECT_DOUBLE_EQ(pucci_minus(M, p), -3.0);
  EXPECT_DOUBLE_EQ(pucci_plus(M, p), 0.0);
}

TEST(Pucci, LaplacianWhenConstantsCoincide) {
  const auto M = SymMatrix::from_rows({{1.0, 0.3, 0.0}, {0.3, -4.0, 0.2}, {0.0, 0.2, 2.5}});
  const EllipticityParams p{1.0, 1.0};
  EXPECT_NEAR(pucci_minus(M, p), M.trace(), 1e-12);
  EXPECT_NEAR(pucci_plus(M, p), M.trace(), 1e-12);
}

TEST(Pucci, EigenvaluesOfRotatedMatrix) {
  // eigenvalues 3 and -1 rotated by 30 degrees
  const double c = std::cos(M_PI / 6), s = std::sin(M_PI / 6);
  const double a = 3 * c * c - s * s, b = 3 * s * s - c * c, o = 4 * c * s;
  auto ev = eigenvalues(SymMatrix::from_rows({{a, o}, {o, b}}));
  std::sort(ev.begin(), ev.end());
  EXPECT_NEAR(ev[0], -1.0, 1e-12);
  EXPECT_NEAR(ev[1], 3.0, 1e-12);
}

TEST(Pucci, AttainedOverEnsembleBracketsFormula) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  const EllipticityParams p{0.5, 2.0};
  const auto ens = rotated_ensemble_2d(360, p.lambda, p.Lambda);
  for (int k = 0; k < 50; ++k) {
    const auto M = SymMatrix::from_rows({{u(rng), 0.0}, {0.0, u(rng)}}) + scaled_projector({1.0, 1.0}, u(rng));
    const double lo = pucci_attained(M, p, ens, PucciSign::minus), hi = pucci_attained(M, p, ens, PucciSign::plus);
    // the ensemble is a subset of the admissible set, so it can only undershoot the extremes
    EXPECT_GE(lo, pucci_minus(M, p) - 1e-12);
    EXPECT_LE(hi, pucci_plus(M, p) + 1e-12);
    EXPECT_NEAR(lo, pucci_minus(M, p), 1e-3);
    EXPECT_NEAR(hi, pucci_plus(M, p), 1e-3);
  }
}

TEST(Pucci, EnsembleMembershipRejectsOutOfRange) {
  EXPECT_NO_THROW(check_ensemble_member(SymMatrix::diagonal({1.0, 2.0}), 1.0, 2.0));
  EXPECT_THROW(check_ensemble_member(SymMatrix::diagonal({0.5, 2.0}), 1.0, 2.0), std::invalid_argument);
  EXPECT_THROW(validate_ellipticity(2.0, 1.0), std::invalid_argument);
}

TEST(Pucci, DriftSign) {
  EXPECT_DOUBLE_EQ(drift_term({3.0, 4.0}, 2.0, PucciSign::minus), -10.0);
  EXPECT_DOUBLE_EQ(drift_term({3.0, 4.0}, 2.0, PucciSign::plus), 10.0);
  EXPECT_THROW(drift_term({1.0}, -1.0, PucciSign::plus), std::invalid_argument);
}

TEST(Pucci, AlgebraPropertiesOnSeededSample) {
  const auto r = operator_algebra_check(11, 2000, 200);
  EXPECT_EQ(r.matrices, 2000u);
  EXPECT_EQ(r.diagonal_checked, 200u);
  EXPECT_TRUE(r.pass(1e-10)) << r.duality << " " << r.homogeneity << " " << r.additivity << " "
                             << r.diagonal_mismatches;
}

TEST(Pucci, AlgebraCheckIsDeterministic) {
  const auto a = operator_algebra_check(3, 300, 30), b = operator_algebra_check(3, 300, 30);
  EXPECT_EQ(a.duality, b.duality);
  EXPECT_EQ(a.additivity, b.additivity);
}
