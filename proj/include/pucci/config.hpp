/**
 * @file config.hpp
 * @brief Run configuration: a JSON document listing experiments, with a validating parser
 * that names the offending key path.
 */
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pucci/geometry.hpp"
#include "pucci/grid.hpp"
#include "pucci/moduli.hpp"
#include "pucci/pucci_ops.hpp"

namespace pucci {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
  std::string path;
  ConfigError(std::string p, const std::string& what) : std::runtime_error(p + ": " + what), path(std::move(p)) {}
};

namespace cfg {

inline const json& need(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key, "missing required key");
  return *it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

inline double number(const json& j, const std::string& key, const std::string& path, std::optional<double> fallback) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(path + "." + key, "missing required key");
  }
  return number(j.at(key), path + "." + key);
}

inline std::string text(const json& j, const std::string& key, const std::string& path,
                        std::optional<std::string> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(path + "." + key, "missing required key");
  }
  if (!j.at(key).is_string()) throw ConfigError(path + "." + key, "expected a string");
  return j.at(key).get<std::string>();
}

inline void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(path + "." + it.key(), "unknown key");
}

}  // namespace cfg

/**
 * Named scalar fields used for right-hand sides, boundary data and reference solutions.
 *   constant {value}            product {axes, scale}        tangential-power {exponent, scale}
 *   log-radius {}               by-part {outer, inner, flat}  step {axis, left, right}
 *   linear {coeffs, offset}     height {scale}
 */
struct FieldSpec {
  std::string kind = "constant";
  json params = json{{"value", 0.0}};

  static FieldSpec parse(const json& j, const std::string& path) {
    if (j.is_number()) return {"constant", json{{"value", cfg::number(j, path)}}};
    FieldSpec s;
    s.kind = cfg::text(j, "kind", path);
    s.params = j;
    s.params.erase("kind");
    static const std::map<std::string, std::set<std::string>> keys{
        {"constant", {"value"}},        {"product", {"axes", "scale"}},     {"tangential-power", {"exponent", "scale"}},
        {"log-radius", {}},             {"by-part", {"outer", "inner", "flat"}}, {"step", {"axis", "left", "right"}},
        {"linear", {"coeffs", "offset"}}, {"height", {"scale"}}};
    auto it = keys.find(s.kind);
    if (it == keys.end()) throw ConfigError(path + ".kind", "unknown field kind '" + s.kind + "'");
    cfg::only_keys(s.params, it->second, path);
    for (auto p = s.params.begin(); p != s.params.end(); ++p) {
      if (p.value().is_array()) {
        for (std::size_t i = 0; i < p.value().size(); ++i)
          cfg::number(p.value()[i], path + "." + p.key() + "[" + std::to_string(i) + "]");
      } else {
        cfg::number(p.value(), path + "." + p.key());
      }
    }
    if (s.kind == "constant") cfg::need(s.params, "value", path);
    if (s.kind == "tangential-power" && !(cfg::number(s.params, "exponent", path, std::nullopt) > 0.0))
      throw ConfigError(path + ".exponent", "exponent must be positive");
    return s;
  }

  json to_json() const {
    json j = params;
    j["kind"] = kind;
    return j;
  }

  double get(const std::string& key, double fallback) const {
    return params.contains(key) ? params.at(key).get<double>() : fallback;
  }

  /// Boundary-part values need the grid; everything else is a function of x.
  bool by_part() const { return kind == "by-part"; }

  template <int Dim>
  std::function<double(const Point<Dim>&)> function(const std::string& path = "field") const {
    if (kind == "constant") {
      const double v = get("value", 0.0);
      return [v](const Point<Dim>&) { return v; };
    }
    if (kind == "product") {
      std::vector<int> axes;
      for (const auto& a : params.value("axes", json::array({0, Dim - 1}))) {
        const int ax = static_cast<int>(a.get<double>());
        if (ax < 0 || ax >= Dim) throw ConfigError(path + ".axes", "axis out of range");
        axes.push_back(ax);
      }
      const double s = get("scale", 1.0);
      return [axes, s](const Point<Dim>& x) {
        double v = s;
        for (int a : axes) v *= x[a];
        return v;
      };
    }
    if (kind == "tangential-power") {
      const double p = get("exponent", 1.5), s = get("scale", 1.0);
      return [p, s](const Point<Dim>& x) {
        double r2 = 0.0;
        for (int c = 0; c + 1 < Dim; ++c) r2 += x[c] * x[c];
        return s * std::pow(std::sqrt(r2), p);
      };
    }
    if (kind == "log-radius") {
      return [](const Point<Dim>& x) { return std::log(1.0 / norm<Dim>(x)) / std::log(2.0); };
    }
    if (kind == "step") {
      const int axis = static_cast<int>(get("axis", 0));
      if (axis < 0 || axis >= Dim) throw ConfigError(path + ".axis", "axis out of range");
      const double l = get("left", 0.0), r = get("right", 1.0);
      return [axis, l, r](const Point<Dim>& x) { return x[axis] > 0.0 ? r : l; };
    }
    if (kind == "linear") {
      std::vector<double> c(Dim, 0.0);
      const auto arr = params.value("coeffs", json::array());
      if (arr.size() > static_cast<std::size_t>(Dim)) throw ConfigError(path + ".coeffs", "too many coefficients");
      for (std::size_t i = 0; i < arr.size(); ++i) c[i] = arr[i].get<double>();
      const double off = get("offset", 0.0);
      return [c, off](const Point<Dim>& x) {
        double v = off;
        for (int i = 0; i < Dim; ++i) v += c[i] * x[i];
        return v;
      };
    }
    if (kind == "height") {
      const double s = get("scale", 1.0);
      return [s](const Point<Dim>& x) { return s * x[Dim - 1]; };
    }
    throw ConfigError(path + ".kind", "field kind '" + kind + "' is not a function of x");
  }

  template <int Dim>
  ScalarField<Dim> sample_on(const GridPtr<Dim>& grid, const std::string& path = "field") const {
    if (by_part()) return boundary_by_part_values(grid);
    return sample<Dim>(grid, function<Dim>(path));
  }

 private:
  template <int Dim>
  ScalarField<Dim> boundary_by_part_values(const GridPtr<Dim>& grid) const {
    const double o = get("outer", 0.0), i = get("inner", 0.0), f = get("flat", 0.0);
    std::vector<double> v(grid->size(), 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) {
      const auto& nd = grid->node(k);
      if (nd.tag == NodeTag::interior) continue;
      v[k] = nd.part == BoundaryPart::outer_sphere ? o : nd.part == BoundaryPart::inner_sphere ? i : f;
    }
    return ScalarField<Dim>(grid, std::move(v));
  }
};

struct ProblemSpec {
  int dim = 2;
  DomainKind domain = DomainKind::annulus;
  double radius = 1.0;
  PucciSign op = PucciSign::minus;
  EllipticityParams params;
  FieldSpec rhs;
  FieldSpec boundary;
  std::optional<FieldSpec> reference;

  static ProblemSpec parse(const json& j, const std::string& path) {
    cfg::only_keys(j, {"dim", "domain", "radius", "operator", "lambda", "Lambda", "gamma", "q", "R0", "rhs", "boundary",
                       "reference"},
                   path);
    ProblemSpec p;
    const double d = cfg::number(j, "dim", path, 2.0);
    if (d != 2.0 && d != 3.0) throw ConfigError(path + ".dim", "dimension must be 2 or 3");
    p.dim = static_cast<int>(d);
    try {
      p.domain = domain_kind_from_string(cfg::text(j, "domain", path, "annulus"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path + ".domain", e.what());
    }
    p.radius = cfg::number(j, "radius", path, 1.0);
    if (!(p.radius > 0.0)) throw ConfigError(path + ".radius", "radius must be positive");
    try {
      p.op = pucci_sign_from_string(cfg::text(j, "operator", path, "pucci-minus"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path + ".operator", e.what());
    }
    p.params.lambda = cfg::number(j, "lambda", path, 1.0);
    p.params.Lambda = cfg::number(j, "Lambda", path, 1.0);
    p.params.gamma = cfg::number(j, "gamma", path, 0.0);
    p.params.q = cfg::number(j, "q", path, 4.0);
    p.params.R0 = cfg::number(j, "R0", path, 1.0);
    try {
      p.params.validate(p.dim);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path, e.what());
    }
    p.rhs = j.contains("rhs") ? FieldSpec::parse(j.at("rhs"), path + ".rhs") : FieldSpec{};
    p.boundary = j.contains("boundary") ? FieldSpec::parse(j.at("boundary"), path + ".boundary") : FieldSpec{};
    if (p.rhs.by_part()) throw ConfigError(path + ".rhs.kind", "by-part values are for boundary data only");
    if (j.contains("reference")) p.reference = FieldSpec::parse(j.at("reference"), path + ".reference");
    return p;
  }

  json to_json() const {
    json j{{"dim", dim},
           {"domain", to_string(domain)},
           {"radius", radius},
           {"operator", to_string(op)},
           {"lambda", params.lambda},
           {"Lambda", params.Lambda},
           {"gamma", params.gamma},
           {"q", params.q},
           {"R0", params.R0},
           {"rhs", rhs.to_json()},
           {"boundary", boundary.to_json()}};
    if (reference) j["reference"] = reference->to_json();
    return j;
  }
};

/// Grid resolutions as cells per unit length (h = 1/n); several values mean a refinement study.
struct GridSpec {
  std::vector<int> n{64};

  static GridSpec parse(const json& j, const std::string& path) {
    GridSpec g;
    if (j.is_number()) {
      g.n = {static_cast<int>(cfg::number(j, path))};
    } else {
      cfg::only_keys(j, {"n"}, path);
      const auto& v = cfg::need(j, "n", path);
      g.n.clear();
      if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) g.n.push_back(static_cast<int>(cfg::number(v[i], path + ".n[" + std::to_string(i) + "]")));
      } else {
        g.n.push_back(static_cast<int>(cfg::number(v, path + ".n")));
      }
    }
    if (g.n.empty()) throw ConfigError(path + ".n", "at least one resolution is required");
    for (int n : g.n)
      if (n < 4 || n > 4096) throw ConfigError(path + ".n", "resolution must lie in [4, 4096]");
    return g;
  }

  json to_json() const { return json{{"n", n}}; }
};

struct ModulusSpec {
  std::string family = "holder";
  double alpha = 0.5, gamma = 0.0, beta = 0.75, scale = 1.0;

  static ModulusSpec parse(const json& j, const std::string& path) {
    cfg::only_keys(j, {"family", "alpha", "gamma", "beta", "scale"}, path);
    ModulusSpec m;
    m.family = cfg::text(j, "family", path);
    m.alpha = cfg::number(j, "alpha", path, 0.5);
    m.gamma = cfg::number(j, "gamma", path, 0.0);
    m.beta = cfg::number(j, "beta", path, 0.75);
    m.scale = cfg::number(j, "scale", path, 1.0);
    try {
      (void)m.build();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path, e.what());
    } catch (const std::domain_error& e) {
      throw ConfigError(path, e.what());
    }
    return m;
  }

  Modulus build() const {
    Modulus w;
    if (family == "holder") w = Modulus::holder(alpha, beta);
    else if (family == "pure-dini") w = Modulus::pure_dini(gamma, beta);
    else if (family == "mixed") w = Modulus::mixed(alpha, gamma, beta);
    else if (family == "zero") w = Modulus::zero(beta);
    else throw std::invalid_argument("unknown modulus family '" + family + "'");
    return scale == 1.0 ? w : w.renormalized(scale);
  }

  json to_json() const {
    return json{{"family", family}, {"alpha", alpha}, {"gamma", gamma}, {"beta", beta}, {"scale", scale}};
  }
};

inline const std::set<std::string>& estimate_kinds() {
  static const std::set<std::string> k{"solve",      "operator-algebra", "comparison", "barrier",
                                       "ihol",       "hopf-flat",        "boundary-lipschitz",
                                       "wedge",      "krylov",           "dini-tangent",
                                       "moduli",     "sharpness",        "distance-control"};
  return k;
}

struct ExperimentSpec {
  std::string id;
  std::string estimate;
  std::optional<ProblemSpec> problem;
  std::optional<GridSpec> grid;
  std::optional<ModulusSpec> modulus;
  json options = json::object();  // estimate-specific numbers

  static ExperimentSpec parse(const json& j, const std::string& path) {
    cfg::only_keys(j, {"id", "estimate", "problem", "grid", "modulus", "options"}, path);
    ExperimentSpec e;
    e.id = cfg::text(j, "id", path);
    if (e.id.empty()) throw ConfigError(path + ".id", "id must be nonempty");
    e.estimate = cfg::text(j, "estimate", path);
    if (!estimate_kinds().count(e.estimate)) throw ConfigError(path + ".estimate", "unknown estimate '" + e.estimate + "'");
    if (j.contains("problem")) e.problem = ProblemSpec::parse(j.at("problem"), path + ".problem");
    if (j.contains("grid")) e.grid = GridSpec::parse(j.at("grid"), path + ".grid");
    if (j.contains("modulus")) e.modulus = ModulusSpec::parse(j.at("modulus"), path + ".modulus");
    if (j.contains("options")) {
      if (!j.at("options").is_object()) throw ConfigError(path + ".options", "expected an object");
      e.options = j.at("options");
      for (auto it = e.options.begin(); it != e.options.end(); ++it)
        if (it.value().is_array()) {
          for (std::size_t i = 0; i < it.value().size(); ++i)
            cfg::number(it.value()[i], path + ".options." + it.key() + "[" + std::to_string(i) + "]");
        } else {
          cfg::number(it.value(), path + ".options." + it.key());
        }
    }
    static const std::set<std::string> needs_problem{"solve", "ihol", "hopf-flat", "boundary-lipschitz",
                                                     "wedge", "krylov", "dini-tangent"};
    if (needs_problem.count(e.estimate) && !e.problem) throw ConfigError(path + ".problem", "missing required key");
    if (e.estimate == "dini-tangent" && !e.modulus) throw ConfigError(path + ".modulus", "missing required key");
    if (e.grid && e.options.contains("k_max")) {
      const double kmax = e.options.at("k_max").get<double>();
      const double r = e.problem ? e.problem->radius : 1.0;
      for (int n : e.grid->n)
        if (r * std::pow(2.0, -kmax) < 8.0 / n)
          throw ConfigError(path + ".grid.n", "grid does not resolve the smallest dyadic scale (2^-k_max r >= 8h)");
    }
    return e;
  }

  double option(const std::string& key, double fallback) const {
    return options.contains(key) && options.at(key).is_number() ? options.at(key).get<double>() : fallback;
  }

  std::vector<double> option_list(const std::string& key, std::vector<double> fallback) const {
    if (!options.contains(key) || !options.at(key).is_array()) return fallback;
    return options.at(key).get<std::vector<double>>();
  }

  json to_json() const {
    json j{{"id", id}, {"estimate", estimate}, {"options", options}};
    if (problem) j["problem"] = problem->to_json();
    if (grid) j["grid"] = grid->to_json();
    if (modulus) j["modulus"] = modulus->to_json();
    return j;
  }
};

struct RunConfig {
  std::vector<ExperimentSpec> experiments;
  std::string output_dir = "out";
  std::uint64_t seed = 20240601;
  double tol = 1e-8;

  static RunConfig parse(const json& j, const std::string& path = "config") {
    cfg::only_keys(j, {"experiments", "output_dir", "seed", "tolerances"}, path);
    RunConfig c;
    if (j.contains("output_dir")) c.output_dir = cfg::text(j, "output_dir", path);
    if (j.contains("seed")) {
      const double s = cfg::number(j.at("seed"), path + ".seed");
      if (s < 0 || s != std::floor(s)) throw ConfigError(path + ".seed", "seed must be a nonnegative integer");
      c.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("tolerances")) {
      cfg::only_keys(j.at("tolerances"), {"solver"}, path + ".tolerances");
      c.tol = cfg::number(j.at("tolerances"), "solver", path + ".tolerances", c.tol);
      if (!(c.tol > 0.0)) throw ConfigError(path + ".tolerances.solver", "tolerance must be positive");
    }
    const auto& ex = cfg::need(j, "experiments", path);
    if (!ex.is_array()) throw ConfigError(path + ".experiments", "expected an array");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < ex.size(); ++i) {
      const std::string p = path + ".experiments[" + std::to_string(i) + "]";
      c.experiments.push_back(ExperimentSpec::parse(ex[i], p));
      if (!ids.insert(c.experiments.back().id).second) throw ConfigError(p + ".id", "duplicate experiment id");
    }
    return c;
  }

  static RunConfig parse_text(const std::string& text) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    return parse(j);
  }

  json to_json() const {
    json ex = json::array();
    for (const auto& e : experiments) ex.push_back(e.to_json());
    return json{{"experiments", ex}, {"output_dir", output_dir}, {"seed", seed}, {"tolerances", {{"solver", tol}}}};
  }
};

}  // namespace pucci
