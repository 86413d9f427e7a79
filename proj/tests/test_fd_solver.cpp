#include <gtest/gtest.h>

#include <cmath>

#include "pucci/fd_solver.hpp"
#include "pucci/properties.hpp"
#include "pucci/quadrature.hpp"

using namespace pucci;

namespace {

template <int Dim, class Fn>
DirichletProblem<Dim> problem_with_exact(const DomainDescriptor<Dim>& dom, double h, EllipticityParams p, double f,
                                         Fn&& exact, PucciSign sign = PucciSign::minus) {
  auto g = make_grid<Dim>(dom, h);
  return DirichletProblem<Dim>{sign, p, g, constant_field<Dim>(g, f), sample<Dim>(g, exact), std::nullopt};
}

template <int Dim, class Fn>
double sup_error(const ScalarField<Dim>& u, Fn&& exact) {
  double e = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u[i] - exact(u.grid().node(i).x)));
  return e;
}

}  // namespace

TEST(Solver, AffineSolutionIsReproduced) {
  auto exact = [](const Point<2>& x) { return 0.3 + x[0] - 2.0 * x[1]; };
  const auto p = problem_with_exact<2>(DomainDescriptor<2>::ball(1.0), 1.0 / 16, {1.0, 3.0}, 0.0, exact);
  const auto r = solve(p);
  ASSERT_TRUE(r.converged);
  EXPECT_LT(sup_error(r.u, exact), 1e-9);
}

TEST(Solver, QuadraticWithUnequalConstants) {
  // D^2 u = 2I, so P^-[u] = 4 lambda and P^+[u] = 4 Lambda in two dimensions
  auto exact = [](const Point<2>& x) { return x[0] * x[0] + x[1] * x[1]; };
  const EllipticityParams p{0.5, 2.0};
  const auto dom = DomainDescriptor<2>::annulus(1.0);
  const auto rm = solve(problem_with_exact<2>(dom, 1.0 / 16, p, 2.0, exact, PucciSign::minus));
  const auto rp = solve(problem_with_exact<2>(dom, 1.0 / 16, p, 8.0, exact, PucciSign::plus));
  ASSERT_TRUE(rm.converged && rp.converged);
  EXPECT_LT(sup_error(rm.u, exact), 1e-8);
  EXPECT_LT(sup_error(rp.u, exact), 1e-8);
}

TEST(Solver, ThreeDimensionalQuadratic) {
  auto exact = [](const Point<3>& x) { return x[0] * x[0] - 0.5 * x[2] + 0.25; };
  const EllipticityParams p{1.0, 2.0};
  const auto r = solve(problem_with_exact<3>(DomainDescriptor<3>::ball(1.0), 1.0 / 6, p, 2.0, exact));
  ASSERT_TRUE(r.converged);
  EXPECT_LT(sup_error(r.u, exact), 1e-8);
}

TEST(Solver, HarmonicAnnulusConverges) {
  auto exact = [](const Point<2>& x) { return std::log(1.0 / norm<2>(x)) / std::log(2.0); };
  std::vector<double> hs, errs;
  for (int n : {16, 32}) {
    auto g = make_grid<2>(DomainDescriptor<2>::annulus(1.0), 1.0 / n);
    DirichletProblem<2> p{PucciSign::minus, {1.0, 1.0}, g, constant_field<2>(g, 0.0), boundary_by_part<2>(g, 0.0, 1.0),
                          std::nullopt};
    const auto r = solve(p);
    ASSERT_TRUE(r.converged);
    hs.push_back(1.0 / n);
    errs.push_back(sup_error(r.u, exact));
  }
  EXPECT_LT(errs.back(), errs.front());
  EXPECT_GT(fit_loglog(hs, errs).slope, 0.8);
}

TEST(Solver, PolicyAndEulerAgree) {
  auto g = make_grid<2>(DomainDescriptor<2>::half_ball(1.0), 1.0 / 8);
  DirichletProblem<2> p{PucciSign::minus, {1.0, 2.0, 0.5}, g, constant_field<2>(g, 1.0),
                        sample<2>(g, [](const Point<2>& x) { return x[0] * x[1]; }), std::nullopt};
  SolveOptions a, b;
  a.tol = b.tol = 1e-10;
  b.method = SolveMethod::euler;
  const auto ra = solve(p, a), rb = solve(p, b);
  ASSERT_TRUE(ra.converged && rb.converged);
  for (std::size_t i = 0; i < g->size(); ++i) EXPECT_NEAR(ra.u[i], rb.u[i], 1e-7);
  EXPECT_LE(residual(ra.u, p), 1e-10);
}

TEST(Solver, DriftSolutionConvergesUnderRefinement) {
  // P^-[u] - gamma |Du| = f with u = x^2: f = 2 lambda - 2 gamma |x|
  const EllipticityParams p{1.0, 2.0, 0.5};
  auto exact = [](const Point<2>& x) { return x[0] * x[0]; };
  std::vector<double> errs;
  for (int n : {8, 16, 32}) {
    auto g = make_grid<2>(DomainDescriptor<2>::ball(1.0), 1.0 / n);
    DirichletProblem<2> pr{PucciSign::minus, p, g,
                           sample<2>(g, [&](const Point<2>& x) { return 2.0 * p.lambda - 2.0 * p.gamma * std::abs(x[0]); }),
                           sample<2>(g, exact), std::nullopt};
    const auto r = solve(pr);
    ASSERT_TRUE(r.converged);
    errs.push_back(sup_error(r.u, exact));
  }
  EXPECT_LT(errs[2], errs[1]);
  EXPECT_LT(errs[1], errs[0]);
  EXPECT_LT(errs[2], 0.02);
}

TEST(Solver, MonotoneInBoundaryData) {
  auto g = make_grid<2>(DomainDescriptor<2>::annulus(1.0), 1.0 / 8);
  auto mk = [&](double c) {
    return DirichletProblem<2>{PucciSign::plus, {1.0, 2.0, 0.5}, g, constant_field<2>(g, -1.0),
                               boundary_by_part<2>(g, c, 1.0), std::nullopt};
  };
  const auto lo = solve(mk(0.0)), hi = solve(mk(0.5));
  for (std::size_t i = 0; i < g->size(); ++i) EXPECT_GE(hi.u[i], lo.u[i] - 1e-12);
}

TEST(Solver, ComparisonOnSmallSample) {
  const auto r = comparison_check(5, 3, {0.0, 0.5});
  EXPECT_EQ(r.pairs, 6u);
  EXPECT_TRUE(r.pass(1e-10)) << r.worst;
}

TEST(Solver, RejectsMismatchedFields) {
  auto g1 = make_grid<2>(DomainDescriptor<2>::ball(1.0), 1.0 / 8);
  auto g2 = make_grid<2>(DomainDescriptor<2>::ball(1.0), 1.0 / 4);
  DirichletProblem<2> p{PucciSign::minus, {1.0, 2.0}, g1, constant_field<2>(g2, 0.0), constant_field<2>(g1, 0.0),
                        std::nullopt};
  EXPECT_THROW(solve(p), std::invalid_argument);
}

TEST(Solver, ConvergenceJsonListsResiduals) {
  auto g = make_grid<2>(DomainDescriptor<2>::ball(1.0), 1.0 / 8);
  DirichletProblem<2> p{PucciSign::minus, {1.0, 2.0}, g, constant_field<2>(g, 1.0), constant_field<2>(g, 0.0),
                        std::nullopt};
  const auto r = solve(p);
  const std::string js = convergence_json(r);
  EXPECT_NE(js.find("residual"), std::string::npos);
  EXPECT_FALSE(r.residual_history.empty());
}
