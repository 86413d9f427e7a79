// Acceptance run: nine checks, one PASS/FAIL line each, exit status 1 if any fails.
// Each check also enforces its runtime budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "pucci/barriers.hpp"
#include "pucci/fd_solver.hpp"
#include "pucci/moduli.hpp"
#include "pucci/properties.hpp"
#include "pucci/quadrature.hpp"
#include "pucci/regularity_lab.hpp"

using namespace pucci;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char b[64];
  std::snprintf(b, sizeof b, f, v);
  return b;
}

double sup_diff(const ScalarField<2>& a, const ScalarField<2>& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

Outcome operator_algebra() {
  const auto r = operator_algebra_check(20240601, 10000, 1000);
  std::ostringstream d;
  d << "duality " << r.duality << ", homogeneity " << r.homogeneity << ", additivity " << r.additivity << ", "
    << r.diagonal_mismatches << "/" << r.diagonal_checked << " diagonal mismatches";
  return {r.matrices == 10000 && r.diagonal_checked == 1000 && r.pass(1e-10), d.str()};
}

Outcome solver_oracle() {
  std::vector<double> hs, errs;
  for (int n : {64, 128, 256}) {
    auto g = make_grid<2>(DomainDescriptor<2>::annulus(1.0), 1.0 / n);
    DirichletProblem<2> p{PucciSign::minus, {1.0, 1.0}, g, constant_field<2>(g, 0.0), boundary_by_part<2>(g, 0.0, 1.0),
                          std::nullopt};
    const auto r = solve(p);
    if (!r.converged) return {false, "solver did not converge at n=" + std::to_string(n)};
    const auto exact = sample<2>(g, [](const Point<2>& x) { return std::log(1.0 / norm<2>(x)) / std::log(2.0); });
    hs.push_back(1.0 / n);
    errs.push_back(sup_diff(r.u, exact));
  }
  const double order = fit_loglog(hs, errs).slope;
  return {errs[1] <= 0.02 && order >= 0.9,
          "sup error at h=1/128 " + fmt("%.3g", errs[1]) + ", order " + fmt("%.3f", order)};
}

Outcome comparison() {
  const auto r = comparison_check(7, 100, {0.0, 0.5});
  std::ostringstream d;
  d << r.pairs << " pairs, max(u2 - u1) " << r.worst << ", violations " << r.violations << ", unconverged "
    << r.unconverged;
  return {r.pairs == 200 && r.pass(1e-10), d.str()};
}

Outcome barrier_geometry() {
  double phi_err = 0.0;
  for (double E0 : {1.0, 2.0, 4.0})
    for (int i = 0; i <= 50; ++i) {
      const double s = 0.5 + 0.01 * i;
      phi_err = std::max(phi_err, std::abs(phi_closed(s, E0) - phi_quadrature(s, E0, 0.0)));
    }
  const EllipticityParams p{1.0, 2.0, 0.5, 4.0};
  std::vector<double> lower, upper;
  for (int n : {32, 64, 128}) {
    auto g = make_grid<2>(DomainDescriptor<2>::annulus(1.0), 1.0 / n);
    DirichletProblem<2> prob{PucciSign::minus, p, g, constant_field<2>(g, 0.0), boundary_by_part<2>(g, 0.0, 1.0),
                             std::nullopt};
    const auto s = solve(prob);
    if (!s.converged) return {false, "homogeneous barrier did not converge at n=" + std::to_string(n)};
    const auto geo = fit_distance_bounds(s.u, 1.0, BoundaryPart::outer_sphere);
    if (!geo.lower_positive) return {false, "no positive lower slope at n=" + std::to_string(n)};
    lower.push_back(geo.A_lower);
    upper.push_back(geo.A_upper);
  }
  const double stab = std::max(stability_margin(lower), stability_margin(upper));
  std::vector<double> norms, slopes;
  for (double a : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    const auto b = inhomogeneous_barrier<2>(p, 1.0, 1.0, [&](const Point<2>& x) { return a * (1.0 + x[0]); },
                                            BarrierKind::I, 1.0 / 32);
    norms.push_back(b.geometry.f_norm);
    slopes.push_back(b.geometry.lower_slope);
  }
  const double r2 = fit_line(norms, slopes).r_squared;
  std::ostringstream d;
  d << "phi closed vs quadrature " << phi_err << ", A_lower " << fmt("%.4f", lower[0]) << "/" << fmt("%.4f", lower[1])
    << "/" << fmt("%.4f", lower[2]) << ", A_upper " << fmt("%.4f", upper.back()) << ", stability " << fmt("%.3f", stab)
    << ", inhomogeneous R^2 " << fmt("%.5f", r2);
  return {phi_err <= 1e-10 && stab <= 0.10 && r2 >= 0.95, d.str()};
}

Outcome moduli() {
  struct Family {
    const char* name;
    Modulus w;
  };
  // compatibility is checked at beta = 0.9: with beta = 3/4 the negative mixed family
  // violates the k = 0 inequality for some mu < delta*
  const double beta = 0.9;
  const std::vector<Family> fams{{"holder(1/2)", Modulus::holder(0.5, beta)},
                                 {"pure-dini(-2)", Modulus::pure_dini(-2.0, beta)},
                                 {"mixed(1/2,+1)", Modulus::mixed(0.5, 1.0, beta)},
                                 {"mixed(1/2,-1)", Modulus::mixed(0.5, -1.0, beta)}};
  bool ok = true;
  std::ostringstream d;
  for (const auto& f : fams) {
    const auto r = moduli_suite(f.w, beta, 0.25, 2.0, 0.5, 1000);
    ok = ok && r.pass();
    d << f.name << (r.pass() ? " ok" : " FAIL") << " (dini err " << fmt("%.1e", r.dini_rel_error) << ") ";
  }
  const auto w34 = Modulus::mixed(0.5, -1.0, 0.75);
  const auto c34 = check_beta_compatibility_sampled(w34, 0.75);
  d << "| beta=3/4 mixed(1/2,-1) compatibility " << (c34.pass ? "holds" : "fails at mu=" + fmt("%.4g", c34.witness_mu));
  return {ok, d.str()};
}

Outcome krylov() {
  auto half = [](int n) { return make_grid<2>(DomainDescriptor<2>::half_ball(1.0), 1.0 / n); };
  const auto gx = half(64);
  const auto kx = krylov_decay(sample<2>(gx, [](const Point<2>& x) { return x[0] * x[1]; }));
  double a_err = 0.0;
  for (std::size_t i = 0; i < kx.field.points.size(); ++i)
    a_err = std::max(a_err, std::abs(kx.field.slope[i] - kx.field.points[i][0]));
  const bool exact_ok = !kx.decay.insufficient_resolution && std::abs(kx.decay.alpha - 1.0) <= 0.02 && a_err <= 1e-8 &&
                        !kx.field.points.empty();

  const EllipticityParams p{1.0, 2.0, 0.5, 4.0};
  std::vector<double> alphas, r2s;
  for (int n : {64, 128}) {
    auto g = half(n);
    DirichletProblem<2> prob{PucciSign::minus, p, g,
                             sample<2>(g, [](const Point<2>& x) { return x[0] < 0.0 ? -0.5 : 1.0; }),
                             constant_field<2>(g, 0.0), std::nullopt};
    const auto s = solve(prob);
    if (!s.converged) return {false, "half-ball solve did not converge at n=" + std::to_string(n)};
    const auto k = krylov_decay(s.u);
    if (k.decay.insufficient_resolution) return {false, "too few dyadic levels at n=" + std::to_string(n)};
    alphas.push_back(k.decay.alpha);
    r2s.push_back(k.decay.r_squared);
  }
  bool solved_ok = stability_margin(alphas) <= 0.15;
  for (std::size_t i = 0; i < alphas.size(); ++i) solved_ok = solved_ok && alphas[i] > 0.0 && alphas[i] <= 1.0 && r2s[i] >= 0.9;
  std::ostringstream d;
  d << "x1*xn: alpha " << fmt("%.4f", kx.decay.alpha) << ", max |A - x1| " << a_err << "; solved: alpha "
    << fmt("%.3f", alphas[0]) << "/" << fmt("%.3f", alphas[1]) << ", R^2 " << fmt("%.3f", r2s[0]) << "/"
    << fmt("%.3f", r2s[1]) << ", stability " << fmt("%.3f", stability_margin(alphas));
  return {exact_ok && solved_ok, d.str()};
}

Outcome sharpness_check() {
  const auto s = sharpness_probe();
  const bool ok = s.last_change < 1e-2 && std::abs(s.fit.slope - 0.25) <= 0.02 && std::isfinite(s.norm_sq.back());
  std::ostringstream d;
  d << "||Laplacian||^2 " << fmt("%.5f", s.norm_sq.back()) << " (closed form " << fmt("%.5f", s.norm_sq_closed)
    << ", last change " << fmt("%.2e", s.last_change) << "), slope of u(0,y)/y vs |ln y| " << fmt("%.4f", s.fit.slope);
  return {ok, d.str()};
}

Outcome hopf_ihol() {
  auto gh = make_grid<2>(DomainDescriptor<2>::half_ball(1.0), 1.0 / 32);
  const auto zero_h = constant_field<2>(gh, 0.0);
  const auto hopf = check_hopf_flat(sample<2>(gh, [](const Point<2>& x) { return x[1]; }), zero_h, 4.0);
  const bool hopf_ok = hopf.verdict == Verdict::pass && hopf.constant("D2") == 1.0;

  const EllipticityParams p{1.0, 2.0, 0.5, 4.0};
  std::vector<double> c1;
  bool ihol_pass = true;
  for (int n : {32, 64}) {
    const auto b = inhomogeneous_barrier<2>(p, 1.0, 1.0, [](const Point<2>&) { return 0.1; }, BarrierKind::I, 1.0 / n);
    const auto r = check_ihol(b.solution.u, constant_field<2>(b.solution.u.grid_ptr(), 0.1), p.q);
    ihol_pass = ihol_pass && r.verdict == Verdict::pass && r.constant("C1") > 0.0;
    c1.push_back(r.constant("C1"));
  }
  const double stab = stability_margin(c1);

  // degenerate reference values must come back flagged, never as a pass
  auto ga = make_grid<2>(DomainDescriptor<2>::annulus(1.0), 1.0 / 32);
  const auto zero_a = constant_field<2>(ga, 0.0);
  const auto v1 = check_hopf_flat(zero_h, zero_h, 4.0);
  const auto v2 = check_ihol(zero_a, zero_a, 4.0);
  const auto bump = sample<2>(gh, [](const Point<2>& x) { return std::max(0.0, x[1] - 0.3); });
  const auto v3 = check_hopf_flat(bump, constant_field<2>(gh, 1.0), 4.0);
  const bool vacuous_ok = v1.verdict == Verdict::vacuous && v2.verdict == Verdict::vacuous &&
                          v3.verdict == Verdict::vacuous;
  std::ostringstream d;
  d << "Hopf D2 on x_n " << hopf.constant("D2") << "; IHOL C1 " << fmt("%.4f", c1[0]) << "/" << fmt("%.4f", c1[1])
    << " (stability " << fmt("%.3f", stab) << "); vacuous flags " << to_string(v1.verdict) << "/"
    << to_string(v2.verdict) << "/" << to_string(v3.verdict);
  return {hopf_ok && ihol_pass && stab <= 0.10 && vacuous_ok, d.str()};
}

Outcome dini_tangent() {
  const auto w = Modulus::holder(0.5, 0.75);
  bool ok = true;
  std::ostringstream d;
  for (int n : {64, 128}) {
    auto g = make_grid<2>(DomainDescriptor<2>::half_ball(1.0), 1.0 / n);
    DirichletProblem<2> prob{PucciSign::minus, {1.0, 1.0}, g, constant_field<2>(g, 0.0),
                             sample<2>(g, [](const Point<2>& x) { return std::pow(std::abs(x[0]), 1.5); }),
                             std::nullopt};
    const auto s = solve(prob);
    if (!s.converged) return {false, "Laplace solve did not converge at n=" + std::to_string(n)};
    const auto r = dini_tangent_scheme(s.u, w, 0.5);
    ok = ok && r.tail_bounded && r.residual_bounded && std::isfinite(r.N) && std::isfinite(r.T0);
    d << "n=" << n << ": " << r.scales.size() << " scales, N " << fmt("%.3f", r.N) << ", T0 " << fmt("%.3f", r.T0)
      << ", tail " << (r.tail_bounded ? "bounded" : "UNBOUNDED") << ", residual "
      << (r.residual_bounded ? "bounded" : "UNBOUNDED") << "; ";
  }
  return {ok, d.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{{1, "operator algebra", 10, operator_algebra},
                                   {2, "solver oracle", 120, solver_oracle},
                                   {3, "discrete comparison", 300, comparison},
                                   {4, "barrier geometry", 300, barrier_geometry},
                                   {5, "moduli suite", 10, moduli},
                                   {6, "boundary decay", 600, krylov},
                                   {7, "sharpness", 30, sharpness_check},
                                   {8, "Hopf and IHOL surrogates", 300, hopf_ihol},
                                   {9, "Dini tangent scheme", 600, dini_tangent}};
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = o.ok && secs < c.budget_s;
    if (!ok) ++failed;
    std::printf("%s [%d] %s: %s (%.1f s of %.0f s)\n", ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
