/**
 * @file properties.hpp
 * @brief Seeded randomized property suites: Pucci operator algebra and the discrete
 * comparison principle.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pucci/fd_solver.hpp"
#include "pucci/pucci_ops.hpp"

namespace pucci {

struct AlgebraReport {
  std::size_t matrices = 0;
  double duality = 0.0;      // max |M^-(-M) + M^+(M)|
  double homogeneity = 0.0;  // max |M^pm(tM) - t M^pm(M)| over t >= 0
  double additivity = 0.0;   // max violation of M^-(A)+M^-(B) <= M^-(A+B) <= M^-(A)+M^+(B) and the dual chain
  std::size_t diagonal_checked = 0;
  std::size_t diagonal_mismatches = 0;  // pucci_attained != eigenvalue formula (bitwise)
  bool pass(double tol) const {
    return duality <= tol && homogeneity <= tol && additivity <= tol && diagonal_mismatches == 0;
  }
};

namespace detail {

inline SymMatrix random_symmetric(int n, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.set(i, j, u(rng));
  return m;
}

}  // namespace detail

/**
 * Random symmetric matrices in dimensions 2 and 3 (alternating) with random ellipticity
 * pairs. The diagonal check uses dyadic entries so that both sides are computed exactly.
 */
inline AlgebraReport operator_algebra_check(std::uint64_t seed, std::size_t count = 10000,
                                            std::size_t diagonal_count = 1000) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ul(0.2, 2.0), ut(0.0, 5.0), scale(0.1, 10.0);
  AlgebraReport rep;
  for (std::size_t s = 0; s < count; ++s) {
    const int n = 2 + static_cast<int>(s % 2);
    const double lam = ul(rng), Lam = lam * (1.0 + ul(rng));
    const double sc = scale(rng);
    const EllipticityParams P{lam, Lam};
    const SymMatrix A = detail::random_symmetric(n, rng, sc), B = detail::random_symmetric(n, rng, sc);
    const double t = ut(rng);
    const double tol_scale = std::max(1.0, Lam * sc * n);
    const double mA = pucci_minus(A, P), pA = pucci_plus(A, P);
    const double mB = pucci_minus(B, P), pB = pucci_plus(B, P);
    rep.duality = std::max(rep.duality, std::abs(pucci_minus(-A, P) + pA) / tol_scale);
    rep.homogeneity = std::max(rep.homogeneity, std::abs(pucci_minus(A * t, P) - t * mA) / (tol_scale * std::max(1.0, t)));
    rep.homogeneity = std::max(rep.homogeneity, std::abs(pucci_plus(A * t, P) - t * pA) / (tol_scale * std::max(1.0, t)));
    const double mAB = pucci_minus(A + B, P), pAB = pucci_plus(A + B, P);
    const double v = std::max({mA + mB - mAB, mAB - (mA + pB), (pA + mB) - pAB, pAB - (pA + pB), 0.0});
    rep.additivity = std::max(rep.additivity, v / tol_scale);
    ++rep.matrices;
  }
  std::uniform_int_distribution<int> di(-32, 32), li(1, 8);
  for (std::size_t s = 0; s < diagonal_count; ++s) {
    const int n = 2 + static_cast<int>(s % 2);
    const double lam = li(rng) / 4.0, Lam = lam + li(rng) / 4.0;
    std::vector<double> d(static_cast<std::size_t>(n));
    for (auto& x : d) x = di(rng) / 8.0;
    const SymMatrix M = SymMatrix::diagonal(d);
    const auto ens = diagonal_ensemble(n, lam, Lam);
    const auto formula = pucci_values(M, {lam, Lam});
    if (pucci_attained(M, {lam, Lam}, ens, PucciSign::minus) != formula.minus ||
        pucci_attained(M, {lam, Lam}, ens, PucciSign::plus) != formula.plus)
      ++rep.diagonal_mismatches;
    ++rep.diagonal_checked;
  }
  return rep;
}

struct ComparisonReport {
  std::size_t pairs = 0;
  double worst = 0.0;  // max over pairs and nodes of u2 - u1 (should be <= tol)
  std::size_t violations = 0;
  std::size_t unconverged = 0;
  bool pass(double tol) const { return violations == 0 && unconverged == 0 && worst <= tol; }
};

/**
 * Pairs f1 <= f2 on the unit annulus with shared boundary data; P^-[u_i] = f_i must give
 * u1 >= u2 - tol at every node. f1 is a random trigonometric combination, f2 adds a
 * nonnegative random bump.
 */
inline ComparisonReport comparison_check(std::uint64_t seed, std::size_t pairs, const std::vector<double>& gammas,
                                         double h = 1.0 / 16, double tol = 1e-10, double lambda = 1.0,
                                         double Lambda = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.0, 1.0);
  auto grid = make_grid<2>(DomainDescriptor<2>::annulus(1.0), h);
  ComparisonReport rep;
  SolveOptions opts;
  opts.tol = 1e-12;
  for (double gamma : gammas) {
    EllipticityParams p{lambda, Lambda, gamma};
    for (std::size_t s = 0; s < pairs; ++s) {
      double a[4], k[4];
      for (int i = 0; i < 4; ++i) a[i] = 2 * u(rng), k[i] = 1 + 3 * pos(rng);
      const double bx = 0.75 * u(rng), by = 0.75 * u(rng), bw = 0.05 + 0.3 * pos(rng), bh = 5 * pos(rng);
      const double g0 = u(rng), g1 = u(rng);
      auto f1 = [&](const Point<2>& x) {
        return a[0] * std::sin(k[0] * x[0]) + a[1] * std::cos(k[1] * x[1]) + a[2] * std::sin(k[2] * (x[0] + x[1])) + a[3];
      };
      auto f2 = [&](const Point<2>& x) {
        const double d2 = (x[0] - bx) * (x[0] - bx) + (x[1] - by) * (x[1] - by);
        return f1(x) + bh * std::exp(-d2 / (bw * bw));
      };
      auto g = sample<2>(grid, [&](const Point<2>& x) { return g0 + g1 * x[0]; });
      DirichletProblem<2> p1{PucciSign::minus, p, grid, sample<2>(grid, f1), g, std::nullopt};
      DirichletProblem<2> p2{PucciSign::minus, p, grid, sample<2>(grid, f2), g, std::nullopt};
      const auto s1 = solve(p1, opts), s2 = solve(p2, opts);
      if (!s1.converged || !s2.converged) {
        ++rep.unconverged;
        continue;
      }
      double w = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < grid->size(); ++i) w = std::max(w, s2.u[i] - s1.u[i]);
      rep.worst = std::max(rep.worst, w);
      if (w > tol) ++rep.violations;
      ++rep.pairs;
    }
  }
  return rep;
}

}  // namespace pucci
