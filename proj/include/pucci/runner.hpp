/**
 * @file runner.hpp
 * @brief Executes configured experiments and assembles the JSON run report.
 */
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pucci/barriers.hpp"
#include "pucci/config.hpp"
#include "pucci/fd_solver.hpp"
#include "pucci/moduli.hpp"
#include "pucci/properties.hpp"
#include "pucci/regularity_lab.hpp"

namespace pucci {

inline constexpr const char* kToolkitVersion = "0.1.0";

inline json to_json(const LineFit& f) {
  return json{{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"points", f.points}};
}

inline json to_json(const EstimateReport& r) {
  return json{{"id", r.id},       {"constants", r.constants}, {"fits", r.fits},
              {"verdict", to_string(r.verdict)}, {"note", r.note}, {"nodes", r.nodes}};
}

inline json to_json(const DecayFit& d) {
  return json{{"radii", d.radii}, {"oscillations", d.oscillations}, {"alpha", d.alpha}, {"C", d.C},
              {"r_squared", d.r_squared}, {"exact_linear", d.exact_linear},
              {"insufficient_resolution", d.insufficient_resolution}};
}

inline json to_json(const WedgeTrace& w) {
  return json{{"A", w.A}, {"B", w.B}, {"radii", w.radii}, {"delta0", w.delta0}, {"alpha0", w.alpha0},
              {"r_squared", w.r_squared}, {"closed", w.closed}};
}

inline json to_json(const LemmaItem& i) {
  return json{{"verdict", to_string(i.verdict)}, {"detail", i.detail}, {"worst_ratio", i.worst_ratio}};
}

/// A log-log series that `plot` can render.
inline json series_json(const std::vector<double>& x, const std::vector<double>& y, const std::string& xlabel,
                        const std::string& ylabel) {
  return json{{"x", x}, {"y", y}, {"xlabel", xlabel}, {"ylabel", ylabel}};
}

namespace runner {

struct Context {
  std::uint64_t seed = 0;
  double tol = 1e-8;
  std::string write_dir;  // when nonempty, solve blocks write field CSV and convergence JSON
};

inline std::string verdict_of(bool ok) { return ok ? "pass" : "fail"; }

template <int Dim>
DomainDescriptor<Dim> domain_of(const ProblemSpec& p) {
  switch (p.domain) {
    case DomainKind::ball: return DomainDescriptor<Dim>::ball(p.radius);
    case DomainKind::annulus: return DomainDescriptor<Dim>::annulus(p.radius);
    case DomainKind::half_ball: return DomainDescriptor<Dim>::half_ball(p.radius);
  }
  throw std::logic_error("unhandled domain");
}

template <int Dim>
DirichletProblem<Dim> build_problem(const ProblemSpec& p, int n) {
  auto grid = make_grid<Dim>(domain_of<Dim>(p), 1.0 / n);
  return DirichletProblem<Dim>{p.op, p.params, grid, p.rhs.sample_on<Dim>(grid, "problem.rhs"),
                               p.boundary.sample_on<Dim>(grid, "problem.boundary"), std::nullopt};
}

/// The field to inspect: the reference sampled on the grid when options.analytic = 1, else a solve.
template <int Dim>
std::pair<ScalarField<Dim>, ScalarField<Dim>> field_for(const ExperimentSpec& e, int n, const Context& ctx) {
  const auto& p = *e.problem;
  auto prob = build_problem<Dim>(p, n);
  if (e.option("analytic", 0.0) != 0.0) {
    if (!p.reference) throw ConfigError("problem.reference", "analytic mode needs a reference field");
    return {p.reference->sample_on<Dim>(prob.grid, "problem.reference"), prob.rhs};
  }
  SolveOptions o;
  o.tol = ctx.tol;
  auto r = solve(prob, o);
  if (!r.converged) throw std::runtime_error("solver did not converge at n=" + std::to_string(n));
  return {std::move(r.u), prob.rhs};
}

inline std::vector<int> grids_of(const ExperimentSpec& e, std::vector<int> fallback) {
  return e.grid ? e.grid->n : fallback;
}

template <int Dim>
json run_solve(const ExperimentSpec& e, const Context& ctx) {
  json out;
  std::vector<double> hs, errs;
  bool ok = true;
  json per = json::array();
  for (int n : grids_of(e, {64})) {
    auto prob = build_problem<Dim>(*e.problem, n);
    SolveOptions o;
    o.tol = ctx.tol;
    const auto r = solve(prob, o);
    json g{{"n", n}, {"iterations", r.iterations}, {"residual", r.residual}, {"converged", r.converged},
           {"nodes", prob.grid->size()}};
    ok = ok && r.converged;
    if (e.problem->reference) {
      const auto ref = e.problem->reference->sample_on<Dim>(prob.grid, "problem.reference");
      double err = 0.0;
      for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::abs(r.u[i] - ref[i]));
      g["sup_error"] = err;
      hs.push_back(1.0 / n);
      errs.push_back(err);
    }
    if (!ctx.write_dir.empty()) {
      const std::string stem = ctx.write_dir + "/" + e.id + "_n" + std::to_string(n);
      std::ofstream csv(stem + ".csv");
      write_csv(csv, r.u);
      std::ofstream js(stem + "_convergence.json");
      js << convergence_json(r) << "\n";
      g["files"] = json::array({stem + ".csv", stem + "_convergence.json"});
    }
    per.push_back(g);
  }
  out["measured_constants"] = json{{"per_grid", per}};
  if (!errs.empty()) {
    const double max_err = e.option("max_error", 0.02);
    ok = ok && errs.back() <= max_err;
    bool positive = true;
    for (double v : errs) positive = positive && v > 0.0;
    // errors at round-off level carry no order information
    const bool exact = errs.back() <= 1e-12;
    if (errs.size() >= 2 && positive && !exact) {
      const auto f = fit_loglog(hs, errs);
      out["fits"] = json{{"order", to_json(f)}};
      out["series"] = series_json(hs, errs, "h", "sup error");
      ok = ok && f.slope >= e.option("min_order", 0.0);
    }
  }
  out["verdict"] = verdict_of(ok);
  return out;
}

template <int Dim>
json run_barrier(const ExperimentSpec& e, const Context& ctx) {
  const ProblemSpec base = e.problem ? *e.problem : ProblemSpec{};
  EllipticityParams p = base.params;
  const double M = e.option("M", 1.0), r = base.radius;
  const double E0 = barrier_exponent(p, Dim);
  json out, c, f;
  double phi_err = 0.0;
  if (p.gamma == 0.0)
    for (int i = 0; i <= 10; ++i) {
      const double s = 0.5 + 0.05 * i;
      phi_err = std::max(phi_err, std::abs(phi_closed(s, E0) - phi_quadrature(s, E0, 0.0)));
    }
  c["phi_closed_vs_quadrature"] = phi_err;
  c["phi_three_quarters"] = phi(0.75, p, Dim);
  c["E0"] = E0;
  SolveOptions o;
  o.tol = ctx.tol;
  std::vector<double> A1, A3;
  json per = json::array();
  const auto ns = grids_of(e, {32, 64, 128});
  for (int n : ns) {
    auto grid = make_grid<Dim>(DomainDescriptor<Dim>::annulus(r), 1.0 / n);
    DirichletProblem<Dim> prob{PucciSign::minus, p, grid, constant_field<Dim>(grid, 0.0),
                               boundary_by_part<Dim>(grid, 0.0, M), std::nullopt};
    const auto s = solve(prob, o);
    if (!s.converged) throw std::runtime_error("barrier solve did not converge at n=" + std::to_string(n));
    const auto exact = homogeneous_barrier_field<Dim>(p, M, r, grid);
    double dev = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) dev = std::max(dev, std::abs(s.u[i] - exact[i]));
    const auto g = fit_distance_bounds(s.u, M, BoundaryPart::outer_sphere);
    A1.push_back(g.A_lower);
    A3.push_back(g.A_upper);
    per.push_back(json{{"n", n}, {"A_lower", g.A_lower}, {"A_upper", g.A_upper}, {"deviation_from_profile", dev}});
  }
  c["homogeneous"] = per;
  const double margin = std::max(stability_margin(A1), stability_margin(A3));
  c["stability_margin"] = margin;

  const auto amps = e.option_list("amplitudes", {0.0, 0.5, 1.0, 1.5, 2.0});
  const int ni = static_cast<int>(e.option("inhomogeneous_n", ns.front()));
  const auto f0 = base.rhs.function<Dim>("problem.rhs");
  std::vector<double> norms, lows;
  bool positive = true;
  for (double a : amps) {
    const auto ib = inhomogeneous_barrier<Dim>(p, M, r, [&](const Point<Dim>& x) { return a * f0(x); }, BarrierKind::I,
                                               1.0 / ni, o);
    norms.push_back(ib.geometry.f_norm);
    lows.push_back(ib.geometry.lower_slope);
    if (a == 0.0) positive = ib.geometry.lower_positive;
  }
  c["inhomogeneous_f_norms"] = norms;
  c["inhomogeneous_lower_slopes"] = lows;
  bool linear_ok = true;
  if (norms.size() >= 2) {
    const auto lf = fit_line(norms, lows);
    f["lower_slope_vs_f_norm"] = to_json(lf);
    linear_ok = lf.r_squared >= e.option("min_r_squared", 0.95);
  }
  out["measured_constants"] = c;
  out["fits"] = f;
  const bool ok = phi_err <= 1e-10 && !(margin > e.option("stability", 0.10)) && linear_ok && positive;
  out["verdict"] = verdict_of(ok);
  return out;
}

template <int Dim>
json run_distance_control(const ExperimentSpec& e, const Context& ctx) {
  const ProblemSpec base = e.problem ? *e.problem : ProblemSpec{};
  const auto f0 = base.rhs.function<Dim>("problem.rhs");
  SolveOptions o;
  o.tol = ctx.tol;
  std::vector<double> Cs;
  json per = json::array();
  bool consistent = true;
  for (int n : grids_of(e, {32, 64})) {
    const auto env = control_by_distance_envelope<Dim>(base.params, base.radius, f0, 1.0 / n, o);
    Cs.push_back(env.report.C);
    consistent = consistent && !env.report.inconsistent;
    per.push_back(json{{"n", n}, {"C", env.report.C}, {"f_norm", env.report.f_norm}});
  }
  const double margin = stability_margin(Cs);
  json out{{"measured_constants", {{"per_grid", per}, {"stability_margin", margin}}}};
  out["verdict"] = verdict_of(consistent && std::isfinite(Cs.back()) && !(margin > e.option("stability", 0.10)));
  return out;
}

/// Shared driver for the node-ratio estimates: per-grid report, then a stability margin on `key`.
template <int Dim, class Check>
json run_ratio_estimate(const ExperimentSpec& e, const Context& ctx, const std::string& key, Check&& check) {
  json per = json::array();
  std::vector<double> vals;
  bool all_pass = true, any_vacuous = false;
  for (int n : grids_of(e, {32, 64})) {
    auto [u, f] = field_for<Dim>(e, n, ctx);
    const EstimateReport r = check(u, f);
    json g = to_json(r);
    g["n"] = n;
    per.push_back(g);
    if (r.verdict == Verdict::vacuous) any_vacuous = true;
    else if (r.verdict != Verdict::pass) all_pass = false;
    if (r.constants.count(key)) vals.push_back(r.constants.at(key));
  }
  const double margin = stability_margin(vals);
  json out{{"measured_constants", {{"per_grid", per}, {"stability_margin", margin}, {"key", key}}}};
  if (any_vacuous) out["verdict"] = "vacuous";
  else out["verdict"] = verdict_of(all_pass && !(margin > e.option("stability", 0.10)));
  return out;
}

template <int Dim>
json run_wedge(const ExperimentSpec& e, const Context& ctx) {
  json per = json::array();
  bool ok = true;
  for (int n : grids_of(e, {64})) {
    auto [u, f] = field_for<Dim>(e, n, ctx);
    const auto w = wedge_iteration(u, e.option("bound_tol", 1e-9));
    json g = to_json(w);
    g["n"] = n;
    per.push_back(g);
    for (int k = 1; k < w.levels(); ++k) ok = ok && w.A[k] >= w.A[k - 1] && w.B[k] <= w.B[k - 1];
    ok = ok && (w.closed || w.delta0 < 1.0);
  }
  json out{{"measured_constants", {{"per_grid", per}}}};
  const auto& last = per.back();
  if (!last["closed"].get<bool>()) {
    std::vector<double> ap;
    for (std::size_t k = 0; k < last["A"].size(); ++k) ap.push_back(last["B"][k].get<double>() - last["A"][k].get<double>());
    out["series"] = series_json(last["radii"].get<std::vector<double>>(), ap, "radius", "aperture");
  }
  out["verdict"] = verdict_of(ok);
  return out;
}

template <int Dim>
json run_krylov(const ExperimentSpec& e, const Context& ctx) {
  json per = json::array();
  std::vector<double> alphas;
  std::string verdict = "pass";
  json series;
  for (int n : grids_of(e, {64, 128})) {
    auto [u, f] = field_for<Dim>(e, n, ctx);
    const auto k = krylov_decay(u, static_cast<int>(e.option("stride", 4)));
    json g{{"n", n}, {"decay", to_json(k.decay)}, {"seminorm", k.field.seminorm}, {"points", k.field.slope.size()}};
    if (!k.field.slope.empty()) g["slope_at_first_point"] = k.field.slope.front();
    per.push_back(g);
    if (k.decay.exact_linear) continue;
    if (k.decay.insufficient_resolution) {
      verdict = "inconclusive";
      continue;
    }
    alphas.push_back(k.decay.alpha);
    if (k.decay.r_squared < 0.9 && verdict == "pass") verdict = "inconclusive";
    if (!(k.decay.alpha > 0.0 && k.decay.alpha <= 1.0 + e.option("alpha_slack", 0.02))) verdict = "fail";
    series = series_json(k.decay.radii, k.decay.oscillations, "radius", "sup |u/x_n - Psi|");
  }
  const double margin = stability_margin(alphas);
  if (verdict == "pass" && margin > e.option("stability", 0.15)) verdict = "fail";
  json out{{"measured_constants", {{"per_grid", per}, {"stability_margin", margin}}}, {"verdict", verdict}};
  if (!series.is_null()) out["series"] = series;
  return out;
}

template <int Dim>
json run_dini_tangent(const ExperimentSpec& e, const Context& ctx) {
  const Modulus w = e.modulus->build();
  json per = json::array();
  bool ok = true;
  json series;
  for (int n : grids_of(e, {64, 128})) {
    auto [u, f] = field_for<Dim>(e, n, ctx);
    const auto d = dini_tangent_scheme(u, w, e.option("mu", 0.5), e.option("beta_star", 0.5));
    per.push_back(json{{"n", n},
                       {"scales", d.scales},
                       {"G", d.G},
                       {"increments", d.increments},
                       {"omega0", d.omega0},
                       {"residual", d.residual},
                       {"N", d.N},
                       {"T0", d.T0},
                       {"Psi0", d.Psi0},
                       {"tail_sum", d.tail_sum},
                       {"tail_bound", d.tail_bound},
                       {"tail_bounded", d.tail_bounded},
                       {"residual_bounded", d.residual_bounded}});
    ok = ok && d.tail_bounded && d.residual_bounded && std::isfinite(d.N) && std::isfinite(d.T0);
    std::vector<double> t(d.scales.begin(), d.scales.end() - 1);
    bool positive = true;
    for (double v : d.increments) positive = positive && v > 0.0;
    if (positive && t.size() >= 2) series = series_json(t, d.increments, "scale", "|G_{k+1} - G_k|");
  }
  json out{{"measured_constants", {{"per_grid", per}}}, {"verdict", verdict_of(ok)}};
  if (!series.is_null()) out["series"] = series;
  return out;
}

inline json run_moduli(const ExperimentSpec& e) {
  const ModulusSpec ms = e.modulus ? *e.modulus : ModulusSpec{};
  const Modulus w = ms.build();
  const auto r = moduli_suite(w, e.option("beta", ms.beta), e.option("mu", 0.25), e.option("Theta", 2.0),
                              e.option("beta_star", 0.5), static_cast<std::size_t>(e.option("samples", 1000)));
  json c{{"delta", w.delta},
         {"delta_star", w.delta_star},
         {"Q", w.Q},
         {"dini", w.is_dini()},
         {"q_quotient", {{"pass", r.quotient.pass}, {"worst_ratio", r.quotient.worst_ratio}}},
         {"beta_compatibility",
          {{"pass", r.compatibility.pass},
           {"worst_ratio", r.compatibility.worst_ratio},
           {"witness_k", r.compatibility.witness_k},
           {"witness_mu", r.compatibility.witness_mu},
           {"witness_delta", r.compatibility.witness_delta}}},
         {"dini_closed_vs_numeric", r.dini_rel_error},
         {"lemma_bound", to_json(r.lemma.i_bound)},
         {"lemma_dilation", to_json(r.lemma.i_dilation)},
         {"lemma_scale_passing", to_json(r.lemma.i_scale_passing)},
         {"lemma_series", to_json(r.lemma.ii_series)},
         {"lemma_power_quotient", to_json(r.lemma.iii_power_quotient)},
         {"lemma_power_alpha", r.lemma.iii_alpha},
         {"theta_scale_passing", {{"pass", r.theta_passing.pass}, {"worst_ratio", r.theta_passing.worst_ratio}}}};
  return json{{"measured_constants", c}, {"verdict", verdict_of(r.pass())}};
}

inline json run_sharpness() {
  const auto s = sharpness_probe();
  json c{{"f_norm_squared", s.norm_sq.back()},
         {"f_norm_squared_closed", s.norm_sq_closed},
         {"last_relative_change", s.last_change},
         {"chain_bound", s.chain_bound},
         {"A0", s.A0},
         {"gradient_diverges", s.gradient_diverges},
         {"derivative_mismatch", s.derivative_mismatch},
         {"ratio_at_exp_minus_16", sharpness::u(0.0, std::exp(-16.0)) / std::exp(-16.0)}};
  std::vector<double> ll;
  for (double y : s.ys) ll.push_back(std::abs(std::log(y)));
  const bool ok = s.last_change < 1e-2 && std::abs(s.fit.slope - 0.25) <= 0.02 && s.gradient_diverges &&
                  s.norm_sq.back() <= s.chain_bound;
  return json{{"measured_constants", c},
              {"fits", {{"ratio_vs_log", to_json(s.fit)}}},
              {"series", series_json(ll, s.ratios, "|ln y|", "u(0,y)/y")},
              {"verdict", verdict_of(ok)}};
}

template <int Dim>
json dispatch(const ExperimentSpec& e, const Context& ctx) {
  const double q = e.problem ? e.problem->params.q : 4.0;
  if (e.estimate == "solve") return run_solve<Dim>(e, ctx);
  if (e.estimate == "barrier") return run_barrier<Dim>(e, ctx);
  if (e.estimate == "distance-control") return run_distance_control<Dim>(e, ctx);
  if (e.estimate == "ihol")
    return run_ratio_estimate<Dim>(e, ctx, "C1", [&](const auto& u, const auto& f) { return check_ihol(u, f, q); });
  if (e.estimate == "hopf-flat")
    return run_ratio_estimate<Dim>(e, ctx, "D2", [&](const auto& u, const auto& f) { return check_hopf_flat(u, f, q); });
  if (e.estimate == "boundary-lipschitz")
    return run_ratio_estimate<Dim>(e, ctx, "D1",
                                   [&](const auto& u, const auto& f) { return check_boundary_lipschitz(u, f, q); });
  if (e.estimate == "wedge") return run_wedge<Dim>(e, ctx);
  if (e.estimate == "krylov") return run_krylov<Dim>(e, ctx);
  if (e.estimate == "dini-tangent") return run_dini_tangent<Dim>(e, ctx);
  throw std::logic_error("estimate '" + e.estimate + "' has no grid driver");
}

}  // namespace runner

/// One report block; failures inside an experiment are recorded and do not stop the run.
inline json run_experiment(const ExperimentSpec& e, const runner::Context& ctx) {
  json block;
  try {
    if (e.estimate == "operator-algebra") {
      const auto r = operator_algebra_check(ctx.seed, static_cast<std::size_t>(e.option("count", 10000)),
                                            static_cast<std::size_t>(e.option("diagonal_count", 1000)));
      block["measured_constants"] = json{{"matrices", r.matrices},         {"duality", r.duality},
                                         {"homogeneity", r.homogeneity},   {"additivity", r.additivity},
                                         {"diagonal_checked", r.diagonal_checked},
                                         {"diagonal_mismatches", r.diagonal_mismatches}};
      block["verdict"] = runner::verdict_of(r.pass(e.option("tolerance", 1e-10)));
    } else if (e.estimate == "comparison") {
      const auto r = comparison_check(ctx.seed, static_cast<std::size_t>(e.option("pairs", 100)),
                                      e.option_list("gammas", {0.0, 0.5}), 1.0 / e.option("n", 16),
                                      e.option("tolerance", 1e-10));
      block["measured_constants"] = json{{"pairs", r.pairs}, {"worst", r.worst}, {"violations", r.violations},
                                         {"unconverged", r.unconverged}};
      block["verdict"] = runner::verdict_of(r.pass(e.option("tolerance", 1e-10)));
    } else if (e.estimate == "moduli") {
      block = runner::run_moduli(e);
    } else if (e.estimate == "sharpness") {
      block = runner::run_sharpness();
    } else {
      const int dim = e.problem ? e.problem->dim : 2;
      block = dim == 3 ? runner::dispatch<3>(e, ctx) : runner::dispatch<2>(e, ctx);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    block = json{{"verdict", "fail"}, {"note", ex.what()}};
  }
  json out{{"id", e.id}, {"estimate", e.estimate}, {"inputs", e.to_json()}};
  for (auto it = block.begin(); it != block.end(); ++it) out[it.key()] = it.value();
  if (!out.contains("measured_constants")) out["measured_constants"] = json::object();
  if (!out.contains("fits")) out["fits"] = json::object();
  return out;
}

/// Verdict counts; the run passes when every verdict other than vacuous / not-applicable is a pass.
inline json summarize(const json& blocks) {
  std::map<std::string, int> counts{{"pass", 0}, {"fail", 0}, {"vacuous", 0}, {"inconclusive", 0}, {"not-applicable", 0}};
  for (const auto& b : blocks) counts[b.at("verdict").get<std::string>()]++;
  const bool ok = counts["fail"] == 0 && counts["inconclusive"] == 0;
  json s(counts);
  s["overall"] = ok ? "pass" : "fail";
  return s;
}

inline json run_all(const RunConfig& cfg, const std::string& write_dir = "") {
  runner::Context ctx{cfg.seed, cfg.tol, write_dir};
  json blocks = json::array();
  for (const auto& e : cfg.experiments) blocks.push_back(run_experiment(e, ctx));
  return json{{"toolkit_version", kToolkitVersion},
              {"config", cfg.to_json()},
              {"seed", cfg.seed},
              {"experiments", blocks},
              {"summary", summarize(blocks)}};
}

}  // namespace pucci
