/**
 * @file regularity_lab.hpp
 * @brief Measured surrogates of boundary regularity estimates: quotient fields, Hopf type
 * lower bounds, boundary Lipschitz ratios, wedge apertures, Krylov decay, Dini tangent
 * slopes, Taylor-to-seminorm passage and the logarithmic sharpness example.
 *
 * A measured constant is an extremal ratio over admissible nodes (a 2h boundary layer
 * excluded). Stability is judged by comparing two refinements.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pucci/fd_solver.hpp"
#include "pucci/moduli.hpp"
#include "pucci/quadrature.hpp"

namespace pucci {

struct EstimateReport {
  std::string id;
  std::map<std::string, double> constants;
  std::map<std::string, double> fits;
  double stability_margin = std::numeric_limits<double>::quiet_NaN();
  Verdict verdict = Verdict::inconclusive;
  std::string note;
  std::size_t nodes = 0;

  double constant(const std::string& key) const {
    auto it = constants.find(key);
    if (it == constants.end()) throw std::out_of_range("no constant named " + key);
    return it->second;
  }
};

/// Largest relative change between successive entries; NaN for fewer than two.
inline double stability_margin(const std::vector<double>& values) {
  if (values.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double m = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double ref = std::max(std::abs(values[i - 1]), std::abs(values[i]));
    if (ref == 0.0) continue;
    m = std::max(m, std::abs(values[i] - values[i - 1]) / ref);
  }
  return m;
}

/// S*(gamma, sigma, f) is contained in S*(gamma, |f| + sigma |u|).
template <int Dim>
ScalarField<Dim> absorb_zeroth_order(const ScalarField<Dim>& f, const ScalarField<Dim>& u, double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
  if (f.grid_ptr() != u.grid_ptr()) throw std::invalid_argument("fields live on different grids");
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(f[i]) + sigma * std::abs(u[i]);
  return ScalarField<Dim>(f.grid_ptr(), std::move(v));
}

struct MembershipReport {
  double sub_violation = 0.0;    // max (-|f| - P^+[u])_+
  double super_violation = 0.0;  // max (P^-[u] - |f|)_+
  bool member(double scheme_error) const { return sub_violation <= scheme_error && super_violation <= scheme_error; }
};

/// Discrete check of P^+[u] >= -|f| and P^-[u] <= |f| at interior nodes.
template <int Dim>
MembershipReport membership_check(const ScalarField<Dim>& u, const ScalarField<Dim>& f, const EllipticityParams& p) {
  DiscreteOperator<Dim> plus(u.grid_ptr(), PucciSign::plus, p);
  DiscreteOperator<Dim> minus(u.grid_ptr(), PucciSign::minus, p);
  const auto vp = plus.apply(u), vm = minus.apply(u);
  const auto& interior = u.grid().interior();
  MembershipReport rep;
  for (std::size_t k = 0; k < interior.size(); ++k) {
    const double fa = std::abs(f[interior[k]]);
    rep.sub_violation = std::max(rep.sub_violation, -fa - vp[k]);
    rep.super_violation = std::max(rep.super_violation, vm[k] - fa);
  }
  return rep;
}

namespace detail {

template <int Dim>
void require_half_ball(const Grid<Dim>& g) {
  if (g.domain().kind() != DomainKind::half_ball) throw std::invalid_argument("check needs a half-ball grid");
}

template <int Dim>
Point<Dim> flat_projection(const DomainDescriptor<Dim>& dom, Point<Dim> x) {
  x[Dim - 1] = dom.center()[Dim - 1];
  return x;
}

inline double lq_scale(double r, int n, double q, double fnorm) { return std::pow(r, 1.0 - n / q) * fnorm; }

}  // namespace detail

/**
 * u / x_n on a half-ball. Nodes with x_n >= h are measured directly. Below that the
 * value comes from the supplied boundary slope A(x'), or else from the one-sided
 * difference (4u(h) - u(2h) - 3u(0)) / (2h) along the normal.
 */
template <int Dim>
struct QuotientField {
  std::vector<double> values;
  std::vector<char> measured;  // x_n >= h
  std::vector<char> extended;  // filled from a boundary slope
  GridPtr<Dim> grid;

  bool usable(std::size_t i) const { return measured[i] || extended[i]; }

  /// sup - inf of usable values inside the ball of radius rho about x0.
  double oscillation(const Point<Dim>& x0, double rho) const {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!usable(i) || distance<Dim>(grid->node(i).x, x0) > rho * (1 + 1e-12)) continue;
      lo = std::min(lo, values[i]);
      hi = std::max(hi, values[i]);
    }
    return hi >= lo ? hi - lo : 0.0;
  }
};

template <int Dim>
QuotientField<Dim> quotient_field(const ScalarField<Dim>& u,
                                  const std::function<double(const Point<Dim>&)>& boundary_slope = {}) {
  const auto& g = u.grid();
  detail::require_half_ball(g);
  const auto& dom = g.domain();
  const double h = g.h();
  QuotientField<Dim> q{std::vector<double>(g.size(), 0.0), std::vector<char>(g.size(), 0),
                       std::vector<char>(g.size(), 0), u.grid_ptr()};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& x = g.node(i).x;
    const double xn = dom.height(x);
    if (xn >= h * (1 - 1e-9)) {
      q.values[i] = u[i] / xn;
      q.measured[i] = 1;
      continue;
    }
    const Point<Dim> base = detail::flat_projection<Dim>(dom, x);
    if (boundary_slope) {
      q.values[i] = boundary_slope(base);
      q.extended[i] = 1;
      continue;
    }
    Point<Dim> y1 = base, y2 = base;
    y1[Dim - 1] += h;
    y2[Dim - 1] += 2 * h;
    const auto u0 = interpolate<Dim>(u, base), u1 = interpolate<Dim>(u, y1), u2 = interpolate<Dim>(u, y2);
    if (u0 && u1 && u2) {
      q.values[i] = (4 * *u1 - *u2 - 3 * *u0) / (2 * h);
      q.extended[i] = 1;
    }
  }
  return q;
}

/**
 * Lower bound u(x) >= (C1/r u_ref - C2 r^{1-n/q} ||f||) dist(x, outer sphere).
 * On a ball u_ref = u(center); on an annulus it is the minimum over the inner sphere.
 * K = min u/dist over nodes with dist >= 2h. With f = 0, C1 = r K / u_ref. With f != 0
 * C1 is the largest value valid for C2 = 0 and C2 the smallest valid for C1 = 0.
 * The inward normal derivative at sampled outer boundary points is estimated by the
 * one-sided second-order difference.
 */
template <int Dim>
EstimateReport check_ihol(const ScalarField<Dim>& u, const ScalarField<Dim>& f, double q, double tol = 1e-10,
                          std::size_t normal_samples = 64) {
  const auto& g = u.grid();
  const auto& dom = g.domain();
  if (dom.kind() == DomainKind::half_ball) throw std::invalid_argument("check_ihol needs a ball or an annulus");
  EstimateReport rep;
  rep.id = "ihol";
  double umin = std::numeric_limits<double>::infinity();
  for (double v : u.values()) umin = std::min(umin, v);
  if (umin < -tol) throw std::invalid_argument("check_ihol needs u >= 0");
  const double r = dom.outer_radius(), h = g.h();
  const double fnorm = lq_norm(f, q);
  double uref;
  if (dom.kind() == DomainKind::ball) {
    auto v = interpolate<Dim>(u, dom.center());
    if (!v) throw std::invalid_argument("center value unavailable");
    uref = *v;
  } else {
    uref = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g.node(i).tag != NodeTag::interior && g.node(i).part == BoundaryPart::inner_sphere) uref = std::min(uref, u[i]);
  }
  rep.constants["u_ref"] = uref;
  rep.constants["f_norm"] = fnorm;
  if (!(uref > 0.0)) {
    rep.verdict = Verdict::vacuous;
    rep.note = "reference value vanishes, bound is vacuous";
    return rep;
  }
  double K = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = dist_to_part<Dim>(g.node(i).x, dom, BoundaryPart::outer_sphere);
    if (d < 2 * h || !dom.in_closure(g.node(i).x)) continue;
    K = std::min(K, u[i] / d);
    ++rep.nodes;
  }
  if (rep.nodes == 0) throw std::invalid_argument("grid too coarse for check_ihol");
  rep.constants["K"] = K;
  rep.constants["C1"] = std::max(K, 0.0) * r / uref;
  rep.constants["C2"] = fnorm > 0.0 ? std::max(-K, 0.0) / detail::lq_scale(r, Dim, q, fnorm) : 0.0;

  // inward normal derivative at points spread over the outer sphere
  double dnu = std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  for (std::size_t s = 0; s < normal_samples; ++s) {
    Point<Dim> e{};
    if constexpr (Dim == 2) {
      const double th = 2 * M_PI * (s + 0.5) / normal_samples;
      e = {std::cos(th), std::sin(th)};
    } else {
      const double z = 1 - 2 * (s + 0.5) / normal_samples, th = M_PI * (3 - std::sqrt(5.0)) * s;
      const double rho = std::sqrt(std::max(0.0, 1 - z * z));
      e[0] = rho * std::cos(th);
      e[1] = rho * std::sin(th);
      e[2] = z;
    }
    const Point<Dim> x0 = dom.center() + r * e;
    const auto u1 = interpolate<Dim>(u, dom.center() + (r - h) * e);
    const auto u2 = interpolate<Dim>(u, dom.center() + (r - 2 * h) * e);
    if (!u1 || !u2) continue;
    // boundary value at the nearest outer boundary node
    double ub = 0.0, best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.node(i).tag == NodeTag::interior || g.node(i).part != BoundaryPart::outer_sphere) continue;
      const double dd = distance<Dim>(g.node(i).x, x0);
      if (dd < best) best = dd, ub = u[i];
    }
    dnu = std::min(dnu, (4 * *u1 - *u2 - 3 * ub) / (2 * h));
    ++used;
  }
  if (used > 0) rep.constants["normal_derivative_min"] = dnu;

  if (K > 0.0) {
    rep.verdict = Verdict::pass;
  } else if (fnorm > 0.0) {
    rep.verdict = Verdict::vacuous;
    rep.note = "right-hand side dominates, lower bound is vacuous";
  } else {
    rep.verdict = Verdict::fail;
    rep.note = "no positive linear growth with f = 0";
  }
  return rep;
}

/**
 * D1 = sup (|u| - sup_flat |u|)_+ / (x_n (||u||_inf / r + r^{1-n/q} ||f||_q)) over nodes
 * with x_n >= h. One-sided variants use u^+ and u^- separately.
 */
template <int Dim>
EstimateReport check_boundary_lipschitz(const ScalarField<Dim>& u, const ScalarField<Dim>& f, double q) {
  const auto& g = u.grid();
  detail::require_half_ball(g);
  const auto& dom = g.domain();
  EstimateReport rep;
  rep.id = "boundary-lipschitz";
  const double r = dom.outer_radius(), h = g.h();
  double flat_abs = 0.0, flat_pos = 0.0, flat_neg = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.node(i).tag != NodeTag::flat_boundary) continue;
    flat_abs = std::max(flat_abs, std::abs(u[i]));
    flat_pos = std::max(flat_pos, u[i]);
    flat_neg = std::max(flat_neg, -u[i]);
  }
  const double fnorm = lq_norm(f, q);
  const double denom = u.sup_norm() / r + detail::lq_scale(r, Dim, q, fnorm);
  rep.constants["f_norm"] = fnorm;
  if (denom == 0.0) {
    rep.verdict = Verdict::vacuous;
    rep.note = "u and f vanish";
    return rep;
  }
  double d1 = 0.0, dp = 0.0, dm = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xn = dom.height(g.node(i).x);
    if (xn < h * (1 - 1e-9)) continue;
    const double s = xn * denom;
    d1 = std::max(d1, std::max(std::abs(u[i]) - flat_abs, 0.0) / s);
    dp = std::max(dp, std::max(u[i] - flat_pos, 0.0) / s);
    dm = std::max(dm, std::max(-u[i] - flat_neg, 0.0) / s);
    ++rep.nodes;
  }
  rep.constants["D1"] = d1;
  rep.constants["D1_sub"] = dp;
  rep.constants["D1_super"] = dm;
  rep.verdict = Verdict::pass;
  return rep;
}

/**
 * u(x) >= (D2 u(r/2 e_n)/(r/2) - D3 r^{1-n/q} ||f||) x_n on B_{r/2}^+. D2 is normalized by
 * the slope u(r/2 e_n)/(r/2) so that u = x_n gives D2 = 1; D2_unnormalized = 2 D2 uses
 * u(r/2 e_n)/r instead.
 */
template <int Dim>
EstimateReport check_hopf_flat(const ScalarField<Dim>& u, const ScalarField<Dim>& f, double q, double tol = 1e-10) {
  const auto& g = u.grid();
  detail::require_half_ball(g);
  const auto& dom = g.domain();
  EstimateReport rep;
  rep.id = "hopf-flat";
  const double r = dom.outer_radius(), h = g.h();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (u[i] < -tol) throw std::invalid_argument("check_hopf_flat needs u >= 0");
    if (g.node(i).tag == NodeTag::flat_boundary && std::abs(u[i]) > tol)
      throw std::invalid_argument("check_hopf_flat needs zero flat data");
  }
  Point<Dim> top = dom.center();
  top[Dim - 1] += 0.5 * r;
  const auto uref = interpolate<Dim>(u, top);
  if (!uref) throw std::invalid_argument("reference value unavailable");
  const double fnorm = lq_norm(f, q);
  rep.constants["u_ref"] = *uref;
  rep.constants["f_norm"] = fnorm;
  if (!(*uref > 0.0)) {
    rep.verdict = Verdict::vacuous;
    rep.note = "reference value vanishes, bound is vacuous";
    return rep;
  }
  double K = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& x = g.node(i).x;
    const double xn = dom.height(x);
    if (xn < h * (1 - 1e-9) || distance<Dim>(x, dom.center()) > 0.5 * r * (1 + 1e-12)) continue;
    K = std::min(K, u[i] / xn);
    ++rep.nodes;
  }
  if (rep.nodes == 0) throw std::invalid_argument("grid too coarse for check_hopf_flat");
  const double slope = *uref / (0.5 * r);
  rep.constants["K"] = K;
  rep.constants["D2"] = std::max(K, 0.0) / slope;
  rep.constants["D2_unnormalized"] = 2 * std::max(K, 0.0) / slope;
  rep.constants["D3"] = fnorm > 0.0 ? std::max(-K, 0.0) / detail::lq_scale(r, Dim, q, fnorm) : 0.0;
  if (K > 0.0) {
    rep.verdict = Verdict::pass;
  } else if (fnorm > 0.0) {
    rep.verdict = Verdict::vacuous;
    rep.note = "right-hand side dominates, lower bound is vacuous";
  } else {
    rep.verdict = Verdict::fail;
    rep.note = "no positive growth off the flat boundary with f = 0";
  }
  return rep;
}

struct DecayFit {
  std::vector<double> radii;         // strictly decreasing
  std::vector<double> oscillations;  // nonnegative
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double C = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  bool exact_linear = false;           // oscillations vanish
  bool insufficient_resolution = false;
};

/// Least squares of log osc against log radius; needs three positive levels.
inline DecayFit fit_decay(std::vector<double> radii, std::vector<double> osc, double zero_tol = 1e-12) {
  DecayFit d;
  d.radii = std::move(radii);
  d.oscillations = std::move(osc);
  for (std::size_t i = 1; i < d.radii.size(); ++i)
    if (!(d.radii[i] < d.radii[i - 1])) throw std::invalid_argument("radii must decrease strictly");
  double top = 0.0;
  for (double o : d.oscillations) top = std::max(top, o);
  if (d.radii.size() < 3) {
    d.insufficient_resolution = true;
    return d;
  }
  if (top <= zero_tol) {
    d.exact_linear = true;
    return d;
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < d.radii.size(); ++i)
    if (d.oscillations[i] > zero_tol * std::max(top, 1.0)) x.push_back(d.radii[i]), y.push_back(d.oscillations[i]);
  if (x.size() < 3) {
    d.insufficient_resolution = true;
    return d;
  }
  const auto lf = fit_loglog(x, y);
  d.alpha = lf.slope;
  d.C = std::exp(lf.intercept);
  d.r_squared = lf.r_squared;
  return d;
}

struct WedgeTrace {
  std::vector<double> A, B;  // per level k = 0, 1, ...
  std::vector<double> radii;
  double delta0 = std::numeric_limits<double>::quiet_NaN();
  double alpha0 = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  bool closed = false;  // aperture vanished
  int levels() const { return static_cast<int>(A.size()); }
  double aperture(int k) const { return B[k] - A[k]; }
};

/**
 * Inf and sup of u/x_n on B_{2^-k}^+ for k = 0, 1, ... while 2^-k >= 8h. Values below
 * x_n = h come from the one-sided boundary slope.
 * delta0 from a log-linear fit of the positive apertures, alpha0 = -log2 delta0.
 */
template <int Dim>
WedgeTrace wedge_iteration(const ScalarField<Dim>& u, double tol = 1e-9) {
  const auto& g = u.grid();
  detail::require_half_ball(g);
  const auto& dom = g.domain();
  const double h = g.h();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(u[i]) > dom.height(g.node(i).x) + tol) throw std::invalid_argument("wedge iteration needs |u| <= x_n");
  const auto qf = quotient_field(u);
  WedgeTrace w;
  for (double rho = dom.outer_radius(); rho >= 8 * h * (1 - 1e-12); rho *= 0.5) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!qf.usable(i) || distance<Dim>(g.node(i).x, dom.center()) > rho * (1 + 1e-12)) continue;
      lo = std::min(lo, qf.values[i]);
      hi = std::max(hi, qf.values[i]);
    }
    if (!(hi >= lo)) break;
    if (!w.A.empty()) {  // nested sets; guard against round-off only
      lo = std::max(lo, w.A.back());
      hi = std::min(hi, w.B.back());
    }
    w.A.push_back(lo);
    w.B.push_back(hi);
    w.radii.push_back(rho);
  }
  std::vector<double> ks, la;
  double amax = 0.0;
  for (int k = 0; k < w.levels(); ++k) amax = std::max(amax, w.aperture(k));
  for (int k = 0; k < w.levels(); ++k)
    if (w.aperture(k) > 1e-12 * std::max(amax, 1.0)) ks.push_back(k), la.push_back(std::log(w.aperture(k)));
  if (amax <= 1e-12) {
    w.closed = true;
    w.delta0 = 0.0;
    w.alpha0 = std::numeric_limits<double>::infinity();
  } else if (ks.size() >= 2) {
    const auto lf = fit_line(ks, la);
    w.delta0 = std::exp(lf.slope);
    w.alpha0 = -std::log2(w.delta0);
    w.r_squared = lf.r_squared;
  }
  return w;
}

struct BoundaryGradientField {
  std::vector<std::vector<double>> points;  // x0 on the flat boundary
  std::vector<double> slope;                // Psi(x0)
  std::vector<double> alpha;                // per-point decay exponent (NaN when unresolved)
  double seminorm = std::numeric_limits<double>::quiet_NaN();  // [A]_{C^{0,alpha0}}
};

struct KrylovResult {
  DecayFit decay;  // sup over x0 of sup |u/x_n - Psi(x0)| on B_rho^+(x0)
  BoundaryGradientField field;
};

/**
 * For flat points x0 with |x0| <= r/2 (every stride-th lattice point), Psi(x0) is the
 * midrange of u/x_n (boundary slope extension below x_n = h) on the smallest ball
 * B_rho^+(x0), rho = r/2 * 2^-j >= 8h. The decay
 * fit uses the largest deviation |u/x_n - Psi(x0)| over all x0 at each rho.
 */
template <int Dim>
KrylovResult krylov_decay(const ScalarField<Dim>& u, int stride = 4, double tol = 1e-10) {
  const auto& g = u.grid();
  detail::require_half_ball(g);
  const auto& dom = g.domain();
  const double h = g.h(), r = dom.outer_radius();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.node(i).tag == NodeTag::flat_boundary && std::abs(u[i]) > tol)
      throw std::invalid_argument("krylov_decay needs zero flat data");
  std::vector<double> radii;
  for (double rho = 0.5 * r; rho >= 8 * h * (1 - 1e-12); rho *= 0.5) radii.push_back(rho);

  // candidate x0: flat lattice points within r/2
  std::vector<Point<Dim>> x0s;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.node(i).tag != NodeTag::flat_boundary) continue;
    const auto& x = g.node(i).x;
    if (distance<Dim>(x, dom.center()) > 0.5 * r * (1 + 1e-12)) continue;
    const auto idx = g.lattice_index_of(x);
    bool keep = g.lattice_node(idx) == static_cast<long>(i);
    for (int c = 0; c + 1 < Dim; ++c) keep = keep && (idx[c] % stride == 0);
    if (keep) x0s.push_back(x);
  }
  const auto qf = quotient_field(u);
  KrylovResult res;
  std::vector<double> worst(radii.size(), 0.0);
  std::vector<std::size_t> near;
  for (const auto& x0 : x0s) {
    near.clear();
    const double big = radii.empty() ? 0.0 : radii.front();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (qf.usable(i) && distance<Dim>(g.node(i).x, x0) <= big * (1 + 1e-12)) near.push_back(i);
    if (radii.empty() || near.empty()) continue;
    auto extremes = [&](double rho, double psi, double& lo, double& hi, double& dev) {
      lo = std::numeric_limits<double>::infinity(), hi = -lo, dev = 0.0;
      for (auto i : near) {
        const auto& x = g.node(i).x;
        if (distance<Dim>(x, x0) > rho * (1 + 1e-12)) continue;
        const double qv = qf.values[i];
        lo = std::min(lo, qv), hi = std::max(hi, qv), dev = std::max(dev, std::abs(qv - psi));
      }
    };
    double lo, hi, dev;
    extremes(radii.back(), 0.0, lo, hi, dev);
    if (!(hi >= lo)) continue;
    const double psi = 0.5 * (lo + hi);
    std::vector<double> own(radii.size());
    for (std::size_t j = 0; j < radii.size(); ++j) {
      extremes(radii[j], psi, lo, hi, dev);
      own[j] = dev;
      worst[j] = std::max(worst[j], dev);
    }
    res.field.points.emplace_back(x0.begin(), x0.end());
    res.field.slope.push_back(psi);
    const auto pf = fit_decay(radii, own);
    res.field.alpha.push_back(pf.alpha);
  }
  res.decay = fit_decay(radii, worst);
  const double a0 = res.decay.exact_linear ? 1.0 : res.decay.alpha;
  if (std::isfinite(a0)) {
    double s = 0.0;
    const auto& P = res.field.points;
    for (std::size_t i = 0; i < P.size(); ++i)
      for (std::size_t j = i + 1; j < P.size(); ++j) {
        double d2 = 0.0;
        for (int c = 0; c < Dim; ++c) d2 += (P[i][c] - P[j][c]) * (P[i][c] - P[j][c]);
        s = std::max(s, std::abs(res.field.slope[i] - res.field.slope[j]) / std::pow(std::sqrt(d2), a0));
      }
    res.field.seminorm = s;
  }
  return res;
}

/// Best G minimizing max_i |u_i - G y_i| (convex, piecewise linear) and the attained value.
inline std::pair<double, double> minimax_slope(const std::vector<double>& u, const std::vector<double>& y) {
  if (u.size() != y.size() || u.empty()) throw std::invalid_argument("minimax slope needs matching samples");
  auto cost = [&](double G) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i] - G * y[i]));
    return m;
  };
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (y[i] > 0.0) lo = std::min(lo, u[i] / y[i]), hi = std::max(hi, u[i] / y[i]);
  if (!(hi >= lo)) return {0.0, cost(0.0)};
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (cost(m1) <= cost(m2)) hi = m2;
    else lo = m1;
  }
  const double G = 0.5 * (lo + hi);
  return {G, cost(G)};
}

struct DiniTangentResult {
  std::vector<double> scales;      // t_k = mu^k
  std::vector<double> G;           // best slopes
  std::vector<double> residual;    // sup |u - L - G_k x_n| on B_{t_k}^+
  std::vector<double> increments;  // |G_{k+1} - G_k|
  std::vector<double> omega0;      // omega_0(t_k) = t_k^{beta*} + omega(t_k)
  double N = 0.0;                  // max increment / omega_0
  double T0 = 0.0;                 // max residual / (t theta(t))
  double Psi0 = std::numeric_limits<double>::quiet_NaN();
  bool tail_bounded = false;       // sum_{j>=k} incr_j <= N sum_{j>=k} omega_0(mu^j) <= N (series bound)
  bool residual_bounded = false;   // residual <= T0 t theta(t) at every scale
  std::vector<double> tail_sum, tail_bound;
};

/**
 * Slopes G_k minimizing sup |u - L - G x_n| on B_{mu^k}^+ while mu^k >= 8h. L is the
 * affine Taylor part of the boundary data at the center. The summed increments are
 * compared with N times the geometric series of omega_0, itself bounded by
 * t^{beta*}/(1 - mu^{beta*}) + omega(t) + int_0^t omega(s)/s ds / ln(1/mu).
 */
template <int Dim>
DiniTangentResult dini_tangent_scheme(const ScalarField<Dim>& u, const Modulus& w, double mu, double beta_star = 0.5,
                                      const std::function<double(const Point<Dim>&)>& taylor = {}) {
  const auto& g = u.grid();
  detail::require_half_ball(g);
  if (!w.is_dini()) throw NonDiniError("boundary data modulus is not Dini");
  if (!(mu > 0.0 && mu < w.delta_star)) throw std::invalid_argument("mu must lie in (0, delta*)");
  if (!(beta_star > 0.0 && beta_star < 1.0)) throw std::invalid_argument("beta* must lie in (0,1)");
  const auto& dom = g.domain();
  const double h = g.h();
  DiniTangentResult res;
  for (double t = dom.outer_radius(); t >= 8 * h * (1 - 1e-12); t *= mu) {
    std::vector<double> uu, yy;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto& x = g.node(i).x;
      if (distance<Dim>(x, dom.center()) > t * (1 + 1e-12)) continue;
      uu.push_back(u[i] - (taylor ? taylor(x) : 0.0));
      yy.push_back(dom.height(x));
    }
    const auto [G, res_t] = minimax_slope(uu, yy);
    res.scales.push_back(t);
    res.G.push_back(G);
    res.residual.push_back(res_t);
    res.omega0.push_back(std::pow(t, beta_star) + w(std::min(t, w.delta)));
  }
  const std::size_t K = res.scales.size();
  if (K < 2) throw std::invalid_argument("grid too coarse for the tangent scheme");
  for (std::size_t k = 0; k + 1 < K; ++k) {
    res.increments.push_back(std::abs(res.G[k + 1] - res.G[k]));
    res.N = std::max(res.N, res.increments.back() / res.omega0[k]);
  }
  res.Psi0 = res.G.back();
  for (std::size_t k = 0; k < K; ++k) {
    const double t = res.scales[k];
    res.T0 = std::max(res.T0, res.residual[k] / (t * theta(w, beta_star, std::min(t, w.delta))));
  }
  res.residual_bounded = true;
  for (std::size_t k = 0; k < K; ++k) {
    const double t = res.scales[k];
    if (res.residual[k] > res.T0 * t * theta(w, beta_star, std::min(t, w.delta)) * (1 + 1e-12)) res.residual_bounded = false;
  }
  res.tail_bounded = true;
  const double L = std::log(1.0 / mu);
  for (std::size_t k = 0; k + 1 < K; ++k) {
    double s = 0.0;
    for (std::size_t j = k; j + 1 < K; ++j) s += res.increments[j];
    const double t = std::min(res.scales[k], w.delta);
    double series = 0.0, tj = res.scales[k];
    for (int j = 0; j < 2000 && tj > 1e-300; ++j, tj *= mu) series += std::pow(tj, beta_star) + w(std::min(tj, w.delta));
    const double bound = std::pow(res.scales[k], beta_star) / (1 - std::pow(mu, beta_star)) + w(t) + dini_integral(w, t) / L;
    res.tail_sum.push_back(s);
    res.tail_bound.push_back(res.N * bound);
    if (s > res.N * series * (1 + 1e-12) || series > bound * (1 + 1e-9)) res.tail_bounded = false;
  }
  return res;
}

struct TaylorSeminormReport {
  bool control_ok = true;
  std::vector<double> witness_x0, witness_x;  // first violating pair when control fails
  double witness_ratio = 0.0;
  double seminorm = 0.0;      // sup |A(x)-A(y)| / omega(|x-y|) over all pairs
  double near_max = 0.0;      // pairs with |x-y| <= r0/4
  double far_max = 0.0;       // pairs with |x-y| > r0/4, divided by omega(r0/4)
  double far_bound = 0.0;     // 2 ||A||_inf / omega(r0/4)
  double sup_A = 0.0;
  double F = 0.0;             // seminorm / (T + ||A||_inf / omega(r0/4))
  Verdict verdict = Verdict::inconclusive;
};

/**
 * From per-point control |u(x) - A(x0) x_n| <= T |x-x0| omega(|x-x0|) to the seminorm of A.
 * Control is checked against u at nodes within r0 of each x0 when a field is given.
 */
template <int Dim>
TaylorSeminormReport taylor_to_seminorm(const std::vector<Point<Dim>>& x0s, const std::vector<double>& A, double T,
                                        double r0, const Modulus& w, const ScalarField<Dim>* u = nullptr) {
  if (x0s.size() != A.size()) throw std::invalid_argument("one slope per boundary point");
  if (!(r0 > 0.0) || !(T >= 0.0)) throw std::invalid_argument("need r0 > 0 and T >= 0");
  TaylorSeminormReport rep;
  auto om = [&](double t) { return w(std::min(t, w.delta)); };
  if (u) {
    const auto& g = u->grid();
    const auto& dom = g.domain();
    for (std::size_t a = 0; a < x0s.size() && rep.control_ok; ++a)
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto& x = g.node(i).x;
        const double d = distance<Dim>(x, x0s[a]);
        if (d == 0.0 || d > r0) continue;
        const double lhs = std::abs((*u)[i] - A[a] * dom.height(x)), rhs = T * d * om(d);
        if (lhs > rhs * (1 + 1e-9) + 1e-12) {
          rep.control_ok = false;
          rep.witness_x0.assign(x0s[a].begin(), x0s[a].end());
          rep.witness_x.assign(x.begin(), x.end());
          rep.witness_ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
          break;
        }
      }
    if (!rep.control_ok) {
      rep.verdict = Verdict::fail;
      return rep;
    }
  }
  for (double a : A) rep.sup_A = std::max(rep.sup_A, std::abs(a));
  const double wq = om(r0 / 4);
  rep.far_bound = 2 * rep.sup_A / wq;
  for (std::size_t i = 0; i < x0s.size(); ++i)
    for (std::size_t j = i + 1; j < x0s.size(); ++j) {
      const double d = distance<Dim>(x0s[i], x0s[j]);
      if (d == 0.0) continue;
      const double dA = std::abs(A[i] - A[j]);
      if (d <= r0 / 4) {
        rep.near_max = std::max(rep.near_max, dA / om(d));
      } else {
        rep.far_max = std::max(rep.far_max, dA / wq);
      }
      rep.seminorm = std::max(rep.seminorm, dA / om(d));
    }
  rep.F = rep.seminorm / (T + rep.sup_A / wq);
  rep.verdict = rep.far_max <= rep.far_bound * (1 + 1e-12) && std::isfinite(rep.F) ? Verdict::pass : Verdict::fail;
  return rep;
}

/**
 * The logarithmic example u(x,y) = y |ln r|^{1/4}: Laplacian in L^2(B_{1/2}) but
 * u(0,y)/y unbounded, so the Lipschitz bound fails at q = n.
 */
namespace sharpness {

inline double u(double x, double y) {
  const double r = std::hypot(x, y);
  return y * std::pow(std::abs(std::log(r)), 0.25);
}

/// Delta u = (w'' + 3 w'/r) y = -y r^{-2} (L^{-3/4}/2 + 3 L^{-7/4}/16), L = ln(1/r).
inline double laplacian(double x, double y) {
  const double r = std::hypot(x, y), L = std::log(1.0 / r);
  return -y / (r * r) * (0.5 * std::pow(L, -0.75) + 3.0 / 16.0 * std::pow(L, -1.75));
}

inline double dudy_axis(double y) {
  const double L = std::abs(std::log(y));
  return std::pow(L, 0.25) - 0.25 * std::pow(L, -0.75);
}

/// pi int_a^inf (L^{-3/4}/2 + 3 L^{-7/4}/16)^2 dL in closed form, a = ln 2.
inline double f_norm_squared_closed() {
  const double a = std::log(2.0);
  return M_PI * (0.5 * std::pow(a, -0.5) + 0.125 * std::pow(a, -1.5) + 9.0 / 640.0 * std::pow(a, -2.5));
}

}  // namespace sharpness

struct SharpnessReport {
  std::vector<double> truncations, norm_sq;  // ||f||^2 over ln 2 <= L <= cut
  double norm_sq_closed = 0.0;
  double last_change = 1.0;
  double chain_bound = 0.0;                  // 36 pi A0 (2 int s^{-3/2} + int s^{-7/2})
  double A0 = 0.0;
  std::vector<double> ys, ratios;            // u(0,y)/y
  LineFit fit;                               // ln ratio against ln |ln y|
  bool gradient_diverges = false;
  double derivative_mismatch = 0.0;          // closed form against a centred difference
};

inline SharpnessReport sharpness_probe(std::size_t samples = 61) {
  SharpnessReport rep;
  const double a = std::log(2.0);
  auto g = [](double L) {
    const double v = 0.5 * std::pow(L, -0.75) + 3.0 / 16.0 * std::pow(L, -1.75);
    return v * v;
  };
  // (a) log-polar form: int_{B_1/2} f^2 = pi int_a^inf g(L) dL; extend the cut until < 1% change
  double prev = 0.0;
  for (double cut = 4 * a; cut < 1e300; cut *= 4) {
    const double val = M_PI * integrate(g, a, cut, 1e-12);
    rep.truncations.push_back(cut);
    rep.norm_sq.push_back(val);
    if (prev > 0.0) {
      rep.last_change = std::abs(val - prev) / val;
      if (rep.last_change < 1e-2) break;
    }
    prev = val;
  }
  rep.norm_sq_closed = sharpness::f_norm_squared_closed();
  // smallest A0 with r^2 L^{3/2} w'^2 <= A0 and r^4 w''^2 <= A0 (L^{-3/2} + L^{-7/2})
  rep.A0 = 1.0 / 16.0;
  for (double L = a; L < 1e6; L *= 1.01) {
    const double w2 = 0.25 * std::pow(L, -0.75) - 3.0 / 16.0 * std::pow(L, -1.75);
    rep.A0 = std::max(rep.A0, w2 * w2 / (std::pow(L, -1.5) + std::pow(L, -3.5)));
  }
  rep.chain_bound = 36 * M_PI * rep.A0 * (2 * 2 * std::pow(a, -0.5) + 0.4 * std::pow(a, -2.5));
  // (b) u(0,y)/y over [1e-8, 1e-2]
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < samples; ++i) {
    const double y = std::pow(10.0, -8.0 + 6.0 * i / (samples - 1));
    const double ratio = sharpness::u(0.0, y) / y;
    rep.ys.push_back(y);
    rep.ratios.push_back(ratio);
    lx.push_back(std::log(std::abs(std::log(y))));
    ly.push_back(std::log(ratio));
  }
  rep.fit = fit_line(lx, ly);
  // (c) du/dy(0,y) grows as y -> 0
  rep.gradient_diverges = true;
  double last = -std::numeric_limits<double>::infinity();
  for (auto it = rep.ys.rbegin(); it != rep.ys.rend(); ++it) {
    const double y = *it, d = sharpness::dudy_axis(y);
    if (!(d > last)) rep.gradient_diverges = false;
    last = d;
    const double e = 1e-4 * y;
    const double fd = (sharpness::u(0.0, y + e) - sharpness::u(0.0, y - e)) / (2 * e);
    rep.derivative_mismatch = std::max(rep.derivative_mismatch, std::abs(fd - d) / std::abs(d));
  }
  return rep;
}

}  // namespace pucci
