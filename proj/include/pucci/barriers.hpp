/**
 * @file barriers.hpp
 * @brief Radial Pucci barriers on annuli and measurement of their linear-in-distance geometry.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pucci/fd_solver.hpp"
#include "pucci/quadrature.hpp"

namespace pucci {

/// E0 = Lambda (n-1) / lambda
inline double barrier_exponent(const EllipticityParams& p, int n) { return p.Lambda * (n - 1) / p.lambda; }

/// int_s^1 t^{-E0} e^{-c t} dt by adaptive quadrature.
inline double barrier_integral(double s, double E0, double c) {
  return integrate([&](double t) { return std::pow(t, -E0) * std::exp(-c * t); }, s, 1.0, 1e-13);
}

/// phi for gamma = 0: ln(1/s)/ln 2 when E0 = 1, else (s^{1-E0} - 1)/(2^{E0-1} - 1).
inline double phi_closed(double s, double E0) {
  if (std::abs(E0 - 1.0) < 1e-15) return std::log(1.0 / s) / std::log(2.0);
  return (std::pow(s, 1.0 - E0) - 1.0) / (std::pow(2.0, E0 - 1.0) - 1.0);
}

/// phi by quadrature for any gamma >= 0.
inline double phi_quadrature(double s, double E0, double gamma_over_lambda) {
  return barrier_integral(s, E0, gamma_over_lambda) / barrier_integral(0.5, E0, gamma_over_lambda);
}

/**
 * Radial profile on [1/2, 1] with phi(1/2) = 1, phi(1) = 0. M*phi(|x|) solves
 * P^-_gamma = 0 in the unit annulus. Closed form when gamma = 0.
 */
inline double phi(double s, const EllipticityParams& p, int n) {
  p.validate(n);
  if (!(s >= 0.5 - 1e-15 && s <= 1.0 + 1e-15)) throw std::domain_error("phi is defined on [1/2, 1]");
  s = std::clamp(s, 0.5, 1.0);
  const double E0 = barrier_exponent(p, n);
  if (p.gamma == 0.0) return phi_closed(s, E0);
  return phi_quadrature(s, E0, p.gamma / p.lambda);
}

/// Gamma_0(x) = M phi_{gamma r}(|x - c|/r) on a grid over the annulus of outer radius r.
template <int Dim>
ScalarField<Dim> homogeneous_barrier_field(const EllipticityParams& p, double M, double r, const GridPtr<Dim>& grid) {
  const auto& dom = grid->domain();
  if (dom.kind() != DomainKind::annulus) throw std::invalid_argument("barrier lives on an annulus");
  if (std::abs(dom.outer_radius() - r) > 1e-12 * r) throw std::invalid_argument("grid radius differs from r");
  EllipticityParams scaled = p;
  scaled.gamma = p.gamma * r;  // v(x) = u(r x) carries drift gamma r
  const double E0 = barrier_exponent(p, Dim);
  const double norm = scaled.gamma == 0.0 ? 0.0 : barrier_integral(0.5, E0, scaled.gamma / p.lambda);
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double s = std::clamp(distance<Dim>(grid->node(i).x, dom.center()) / r, 0.5, 1.0);
    const double ph = scaled.gamma == 0.0 ? phi_closed(s, E0) : barrier_integral(s, E0, scaled.gamma / p.lambda) / norm;
    v[i] = M * ph;
  }
  return ScalarField<Dim>(grid, std::move(v));
}

/// Extremal slopes of u against distance to one boundary component, outside a 2h layer.
struct BarrierGeometryReport {
  double lower_slope = 0.0;  // min u / d
  double upper_slope = 0.0;  // max u / d
  double A_lower = 0.0;      // lower_slope * r / M (A1 or A1-bar); 0 when M = 0
  double A_upper = 0.0;      // upper_slope * r / M
  double f_norm = 0.0;       // ||f||_{L^q}
  double lower_margin = 0.0; // lower_slope, positive when the lower bound is nontrivial
  bool lower_positive = false;
  bool degenerate = false;   // u vanishes identically
  std::size_t nodes_used = 0;
};

template <int Dim>
BarrierGeometryReport fit_distance_bounds(const ScalarField<Dim>& u, double M, BoundaryPart part) {
  const auto& g = u.grid();
  const auto& dom = g.domain();
  BarrierGeometryReport rep;
  rep.lower_slope = std::numeric_limits<double>::infinity();
  rep.upper_slope = -std::numeric_limits<double>::infinity();
  const double layer = 2.0 * g.h();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& x = g.node(i).x;
    if (!dom.in_closure(x)) continue;
    const double d = dist_to_part<Dim>(x, dom, part);
    if (d < layer) continue;
    const double ratio = u[i] / d;
    rep.lower_slope = std::min(rep.lower_slope, ratio);
    rep.upper_slope = std::max(rep.upper_slope, ratio);
    ++rep.nodes_used;
  }
  if (rep.nodes_used == 0) throw std::invalid_argument("grid too coarse: no node outside the boundary layer");
  rep.degenerate = u.sup_norm() == 0.0;
  const double r = dom.outer_radius();
  if (M > 0.0) {
    rep.A_lower = rep.lower_slope * r / M;
    rep.A_upper = rep.upper_slope * r / M;
  }
  rep.lower_margin = rep.lower_slope;
  rep.lower_positive = rep.lower_slope > 0.0;
  return rep;
}

enum class BarrierKind { I, II };

template <int Dim>
struct InhomogeneousBarrier {
  SolveResult<Dim> solution;
  BarrierGeometryReport geometry;
};

/**
 * Kind I: P^-[u] = f, u = 0 on the outer sphere, M on the inner one; slopes against
 * the distance to the outer sphere. Kind II: P^+[v] = f, v = M outside, 0 inside;
 * slopes against the distance to the inner sphere.
 */
template <int Dim, class F>
InhomogeneousBarrier<Dim> inhomogeneous_barrier(const EllipticityParams& p, double M, double r, F&& f, BarrierKind which,
                                                double h, const SolveOptions& opts = {}) {
  if (!(M >= 0.0)) throw std::invalid_argument("barrier needs M >= 0");
  if (p.gamma < 0.0) throw std::invalid_argument("barrier needs a constant gamma >= 0");
  auto grid = make_grid<Dim>(DomainDescriptor<Dim>::annulus(r), h);
  const bool first = which == BarrierKind::I;
  DirichletProblem<Dim> prob{first ? PucciSign::minus : PucciSign::plus, p, grid, sample<Dim>(grid, f),
                             first ? boundary_by_part<Dim>(grid, 0.0, M) : boundary_by_part<Dim>(grid, M, 0.0),
                             std::nullopt};
  auto sol = solve(prob, opts);
  if (!sol.converged) throw std::runtime_error("barrier solve did not converge");
  auto geom = fit_distance_bounds(sol.u, M, first ? BoundaryPart::outer_sphere : BoundaryPart::inner_sphere);
  geom.f_norm = lq_norm(prob.rhs, p.q);
  return {std::move(sol), geom};
}

struct DistanceControlReport {
  double C = 0.0;            // sup |u| / (r^{1-n/q} ||f||_q dist(x, outer sphere))
  double f_norm = 0.0;
  bool inconsistent = false;  // ||f|| = 0 but u != 0
  std::size_t nodes_used = 0;
};

/**
 * Fitted constant of |u| <= C r^{1-n/q} ||f||_q dist(x, dB_r) for u vanishing on the
 * annulus boundary. Inside the 2h layer next to the outer sphere the ratio is
 * extrapolated linearly from the radial samples at distances 2h and 3h.
 */
template <int Dim>
DistanceControlReport control_by_distance_check(const ScalarField<Dim>& u, const ScalarField<Dim>& f, double q) {
  const auto& g = u.grid();
  const auto& dom = g.domain();
  if (dom.kind() != DomainKind::annulus) throw std::invalid_argument("distance control lives on an annulus");
  DistanceControlReport rep;
  rep.f_norm = lq_norm(f, q);
  const double r = dom.outer_radius();
  const double usup = u.sup_norm();
  if (rep.f_norm == 0.0) {
    rep.inconsistent = usup > 0.0;
    rep.C = usup > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return rep;
  }
  const double scale = std::pow(r, 1.0 - Dim / q) * rep.f_norm;
  const double h = g.h();
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& x = g.node(i).x;
    if (!dom.in_closure(x)) continue;
    const double d = dist_to_part<Dim>(x, dom, BoundaryPart::outer_sphere);
    double ratio;
    if (d >= 2.0 * h) {
      ratio = std::abs(u[i]) / d;
    } else {
      const Point<Dim> e = (1.0 / std::max(norm<Dim>(x - dom.center()), 1e-300)) * (x - dom.center());
      const Point<Dim> y2 = dom.center() + (r - 2.0 * h) * e;
      const Point<Dim> y3 = dom.center() + (r - 3.0 * h) * e;
      const auto v2 = interpolate<Dim>(u, y2), v3 = interpolate<Dim>(u, y3);
      if (!v2 || !v3) continue;
      const double r2 = std::abs(*v2) / (2.0 * h), r3 = std::abs(*v3) / (3.0 * h);
      ratio = std::max(0.0, r2 + (r2 - r3) * (2.0 * h - d) / h);
    }
    best = std::max(best, ratio);
    ++rep.nodes_used;
  }
  rep.C = best / scale;
  return rep;
}

template <int Dim>
struct DistanceEnvelope {
  SolveResult<Dim> lower;  // P^-[G_b] = |f|, zero data
  SolveResult<Dim> upper;  // P^+[G_a] = -|f|, zero data
  DistanceControlReport report;
};

/// Solve both one-sided zero-data problems and fit C on max(|G_a|, |G_b|).
template <int Dim, class F>
DistanceEnvelope<Dim> control_by_distance_envelope(const EllipticityParams& p, double r, F&& f, double h,
                                                   const SolveOptions& opts = {}) {
  auto grid = make_grid<Dim>(DomainDescriptor<Dim>::annulus(r), h);
  auto fabs = sample<Dim>(grid, [&](const Point<Dim>& x) { return std::abs(f(x)); });
  auto fneg = sample<Dim>(grid, [&](const Point<Dim>& x) { return -std::abs(f(x)); });
  DirichletProblem<Dim> pb{PucciSign::minus, p, grid, fabs, constant_field<Dim>(grid, 0.0), std::nullopt};
  DirichletProblem<Dim> pa{PucciSign::plus, p, grid, fneg, constant_field<Dim>(grid, 0.0), std::nullopt};
  auto lo = solve(pb, opts);
  auto up = solve(pa, opts);
  if (!lo.converged || !up.converged) throw std::runtime_error("envelope solve did not converge");
  std::vector<double> env(grid->size());
  for (std::size_t i = 0; i < env.size(); ++i) env[i] = std::max(std::abs(lo.u[i]), std::abs(up.u[i]));
  auto rep = control_by_distance_check(ScalarField<Dim>(grid, std::move(env)), fabs, p.q);
  return {std::move(lo), std::move(up), rep};
}

}  // namespace pucci
