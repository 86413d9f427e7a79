#include <gtest/gtest.h>

#include <cmath>

#include "pucci/moduli.hpp"

using namespace pucci;

TEST(Modulus, FamilyConstants) {
  const auto h = Modulus::holder(0.5, 0.75);
  EXPECT_DOUBLE_EQ(h(0.25), 0.5);
  EXPECT_DOUBLE_EQ(h.delta, 1.0);

  const auto d = Modulus::pure_dini(-2.0, 0.5);
  EXPECT_NEAR(d.delta, std::exp(-2.0), 1e-15);
  EXPECT_NEAR(d.delta_star, std::pow(2.0, -4.0), 1e-15);
  EXPECT_NEAR(d(std::exp(-3.0)), 1.0 / 9.0, 1e-14);

  const auto mp = Modulus::mixed(0.5, 1.0, 0.75);
  EXPECT_NEAR(mp.delta, std::exp(-2.0), 1e-15);
  const auto mm = Modulus::mixed(0.5, -1.0, 0.75);
  EXPECT_NEAR(mm.delta, std::exp(-2.0), 1e-15);
  EXPECT_NEAR(mm.delta_star, 0.0625, 1e-15);
}

TEST(Modulus, RejectsInvalidParameters) {
  EXPECT_THROW(Modulus::holder(0.0, 0.5), std::invalid_argument);
  EXPECT_THROW(Modulus::holder(0.5, 0.25), std::invalid_argument);
  EXPECT_THROW(Modulus::pure_dini(1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(Modulus::mixed(0.5, -1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(Modulus::custom({0.5, 0.1}, {1.0, 2.0}, 0.5), std::invalid_argument);
}

TEST(Modulus, DiniIntegralAgainstHandIntegrals) {
  // int_0^t s^{-1/2} ds = 2 sqrt(t)
  EXPECT_NEAR(dini_integral(Modulus::holder(0.5, 0.75), 0.36), 1.2, 1e-14);
  // int_0^t (ln 1/s)^{-2} ds/s = 1 / ln(1/t)
  const auto d = Modulus::pure_dini(-2.0, 0.5);
  EXPECT_NEAR(dini_integral(d, std::exp(-4.0)), 0.25, 1e-13);
  EXPECT_NEAR(dini_integral_numeric(d, std::exp(-4.0)), 0.25, 1e-10);
  // int_0^t s^{-1/2} ln(1/s) ds = 2 sqrt(t) ln(1/t) + 4 sqrt(t)
  const auto m = Modulus::mixed(0.5, 1.0, 0.75);
  const double t = 0.01, want = 2 * 0.1 * std::log(100.0) + 0.4;
  EXPECT_NEAR(dini_integral(m, t), want, 1e-12);
  EXPECT_NEAR(dini_integral_numeric(m, t), want, 1e-9 * want);
}

TEST(Modulus, ClosedFormMatchesQuadratureForNegativeMixed) {
  const auto m = Modulus::mixed(0.5, -1.0, 0.75);
  for (double t : {1e-6, 1e-3, 0.05, m.delta}) {
    const double c = dini_integral_closed(m, t), n = dini_integral_numeric(m, t);
    EXPECT_NEAR(c, n, 1e-9 * c) << t;
  }
}

TEST(Modulus, NonDiniIsRejected) {
  const auto d = Modulus::pure_dini(-1.0, 0.5);
  EXPECT_FALSE(d.is_dini());
  EXPECT_THROW(dini_integral(d, 0.1), NonDiniError);
  EXPECT_THROW(theta(d, 0.5, 0.1), NonDiniError);
  EXPECT_THROW(dini_integral(Modulus::holder(0.5, 0.5), 2.0), std::domain_error);
}

TEST(Modulus, RenormalizedDilates) {
  const auto h = Modulus::holder(0.5, 0.75).renormalized(4.0);
  EXPECT_NEAR(h(0.01), 0.2, 1e-15);
  EXPECT_NEAR(h.delta, 0.25, 1e-15);
}

TEST(Quotient, DecreasingQuotientPasses) {
  EXPECT_TRUE(check_q_quotient(Modulus::holder(0.5, 0.75), 1.0).pass);
  EXPECT_TRUE(check_q_quotient(Modulus::mixed(0.5, 1.0, 0.75), 1.0).pass);
}

TEST(Quotient, IncreasingQuotientFailsWithWitness) {
  // omega(s)/s = 0.1 up to s = 0.1, then peaks where omega = 0.99/ln 10 at s = 0.1 e^{(0.99/ln 10 - 0.01) ln 10 / 0.99}
  const auto w = Modulus::custom({0.1, 1.0}, {0.01, 1.0}, 0.5);
  const auto v = check_q_quotient(w, 1.0);
  EXPECT_FALSE(v.pass);
  EXPECT_LT(v.h, v.r);
  EXPECT_GT(v.worst_ratio, 1.0);
  const double c = 0.99 / std::log(10.0);
  const double peak = c / (0.1 * std::exp((c - 0.01) / c));
  EXPECT_NEAR(v.worst_ratio, peak / 0.1, 1e-3 * peak / 0.1);
  EXPECT_TRUE(check_q_quotient(w, 1.001 * peak / 0.1).pass);
  EXPECT_FALSE(check_q_quotient(w, 0.999 * peak / 0.1).pass);
}

TEST(Compatibility, HolderHoldsOnWholeRange) {
  const auto w = Modulus::holder(0.5, 0.75);
  EXPECT_TRUE(check_beta_compatibility(w, 0.75, 0.5, 1.0, 60).pass);
  EXPECT_TRUE(check_beta_compatibility_sampled(w, 0.75).pass);
}

TEST(Compatibility, NegativeMixedFailsAtFirstStepForThreeQuarters) {
  const auto w = Modulus::mixed(0.5, -1.0, 0.75);
  const auto all = check_beta_compatibility_sampled(w, 0.75);
  ASSERT_FALSE(all.pass);
  EXPECT_LT(all.witness_mu, w.delta_star);
  EXPECT_EQ(all.witness_k, 0);
  // the violation sits at k = 0; from k = 1 on the same (mu, delta) is fine
  const auto from1 = check_beta_compatibility(w, 0.75, all.witness_mu, all.witness_delta, 60, 1);
  EXPECT_TRUE(from1.pass);
  EXPECT_TRUE(check_beta_compatibility_sampled(w, 0.9).pass);
}

TEST(Compatibility, MuAboveDeltaStarIsOutsideDeclaredRange) {
  const auto w = Modulus::mixed(0.5, -1.0, 0.75);
  const auto v = check_beta_compatibility(w, 0.75, 1.01 * w.delta_star, w.delta, 0);
  EXPECT_FALSE(v.within_declared_range);
  EXPECT_TRUE(check_beta_compatibility(w, 0.75, 0.99 * w.delta_star, w.delta, 0).within_declared_range);
  EXPECT_THROW(check_beta_compatibility(w, 0.75, 1.5, w.delta, 3), std::invalid_argument);
  EXPECT_THROW(check_beta_compatibility(w, 0.75, 0.5, 1.0, 3), std::invalid_argument);
}

TEST(Lemma, HolderItemsPass) {
  const auto r = lemma61(Modulus::holder(0.5, 0.75), 2.0, 0.25, 1);
  EXPECT_EQ(r.i_bound.verdict, Verdict::pass);
  EXPECT_EQ(r.i_dilation.verdict, Verdict::pass);
  EXPECT_EQ(r.i_scale_passing.verdict, Verdict::pass);
  EXPECT_EQ(r.ii_series.verdict, Verdict::pass);
  EXPECT_EQ(r.iii_power_quotient.verdict, Verdict::pass);
}

TEST(Lemma, PowerQuotientNotApplicableWithoutPowerDecay) {
  const auto w = Modulus::pure_dini(-2.0, 0.9);
  const auto r = lemma61(w, 2.0, std::min(w.delta, std::exp(-1.0)), 1);
  EXPECT_EQ(r.iii_power_quotient.verdict, Verdict::not_applicable);
  EXPECT_NE(r.ii_series.verdict, Verdict::fail);
}

TEST(Suite, AllFamiliesPassAtNineTenths) {
  for (const auto& w : {Modulus::holder(0.5, 0.9), Modulus::pure_dini(-2.0, 0.9), Modulus::mixed(0.5, 1.0, 0.9),
                        Modulus::mixed(0.5, -1.0, 0.9)}) {
    const auto r = moduli_suite(w, 0.9, 0.25);
    EXPECT_TRUE(r.pass()) << to_string(w.family) << " gamma " << w.gamma;
    EXPECT_LE(r.dini_rel_error, 1e-9);
  }
}

TEST(Theta, ScalePassing) {
  const auto w = Modulus::holder(0.5, 0.75);
  EXPECT_TRUE(check_theta_scale_passing(w, 0.5, 0.25, 40).pass);
  // theta(t) = t^{1/2} + 2 t^{1/2}
  EXPECT_NEAR(theta(w, 0.5, 0.04), 0.6, 1e-14);
}
