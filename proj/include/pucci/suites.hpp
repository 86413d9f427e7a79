/**
 * @file suites.hpp
 * @brief Built-in experiment suites, stored as configuration documents.
 */
#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pucci/config.hpp"

namespace pucci {

namespace suites {

inline json moduli_block(const std::string& id, json modulus) {
  return json{{"id", id}, {"estimate", "moduli"}, {"modulus", modulus}, {"options", {{"mu", 0.25}, {"samples", 1000}}}};
}

inline json moduli() {
  return json::array({moduli_block("moduli-holder", {{"family", "holder"}, {"alpha", 0.5}, {"beta", 0.9}}),
                      moduli_block("moduli-pure-dini", {{"family", "pure-dini"}, {"gamma", -2.0}, {"beta", 0.9}}),
                      moduli_block("moduli-mixed-plus", {{"family", "mixed"}, {"alpha", 0.5}, {"gamma", 1.0}, {"beta", 0.9}}),
                      moduli_block("moduli-mixed-minus", {{"family", "mixed"}, {"alpha", 0.5}, {"gamma", -1.0}, {"beta", 0.9}})});
}

inline json sharpness() { return json::array({{{"id", "sharpness"}, {"estimate", "sharpness"}}}); }

inline json harmonic_annulus(std::vector<int> ns) {
  return json{{"id", "annulus-harmonic"},
              {"estimate", "solve"},
              {"problem",
               {{"domain", "annulus"},
                {"boundary", {{"kind", "by-part"}, {"outer", 0.0}, {"inner", 1.0}}},
                {"reference", {{"kind", "log-radius"}}}}},
              {"grid", {{"n", ns}}},
              {"options", {{"max_error", 0.02}, {"min_order", ns.size() > 1 ? 0.9 : 0.0}}}};
}

inline json barriers(std::vector<int> ns) {
  json pucci{{"domain", "annulus"}, {"lambda", 1.0}, {"Lambda", 2.0}, {"gamma", 0.5}, {"q", 4.0},
             {"rhs", {{"kind", "linear"}, {"coeffs", {1.0, 0.0}}, {"offset", 1.0}}}};
  return json::array({{{"id", "barrier-geometry"}, {"estimate", "barrier"}, {"problem", pucci}, {"grid", {{"n", ns}}}},
                      {{"id", "distance-control"},
                       {"estimate", "distance-control"},
                       {"problem", pucci},
                       {"grid", {{"n", json::array({ns[0], 2 * ns[0]})}}}}});
}

inline json lab(int n) {
  const json half_x1xn{{"domain", "half_ball"},
                       {"boundary", {{"kind", "product"}, {"axes", {0, 1}}}},
                       {"reference", {{"kind", "product"}, {"axes", {0, 1}}}}};
  const json half_xn{{"domain", "half_ball"},
                     {"boundary", {{"kind", "height"}}},
                     {"reference", {{"kind", "height"}}}};
  const json ihol_annulus{{"domain", "annulus"}, {"lambda", 1.0}, {"Lambda", 2.0}, {"gamma", 0.5},
                          {"rhs", {{"kind", "constant"}, {"value", 0.1}}},
                          {"boundary", {{"kind", "by-part"}, {"outer", 0.0}, {"inner", 1.0}}}};
  const json hopf_cap{{"domain", "half_ball"}, {"lambda", 1.0}, {"Lambda", 2.0},
                      {"boundary", {{"kind", "product"}, {"axes", {1, 1}}}}};
  const json krylov_solved{{"domain", "half_ball"}, {"lambda", 1.0}, {"Lambda", 2.0}, {"gamma", 0.5},
                           {"rhs", {{"kind", "step"}, {"axis", 0}, {"left", -0.5}, {"right", 1.0}}}};
  const json dini_data{{"domain", "half_ball"}, {"boundary", {{"kind", "tangential-power"}, {"exponent", 1.5}}}};
  const json pair = json::array({n, 2 * n});
  // decay fits need three dyadic levels between r/2 and 8h
  const int nk = std::max(n, 64);
  const json kpair = json::array({nk, 2 * nk});
  return json::array({
      {{"id", "hopf-flat-linear"}, {"estimate", "hopf-flat"}, {"problem", half_xn}, {"grid", {{"n", pair}}},
       {"options", {{"analytic", 1}}}},
      {{"id", "hopf-flat-solved"}, {"estimate", "hopf-flat"}, {"problem", hopf_cap}, {"grid", {{"n", pair}}}},
      {{"id", "ihol-barrier"}, {"estimate", "ihol"}, {"problem", ihol_annulus}, {"grid", {{"n", pair}}}},
      {{"id", "lipschitz-x1xn"}, {"estimate", "boundary-lipschitz"}, {"problem", half_x1xn}, {"grid", {{"n", pair}}}},
      {{"id", "wedge-x1xn"}, {"estimate", "wedge"}, {"problem", half_x1xn}, {"grid", {{"n", json::array({2 * n})}}},
       {"options", {{"analytic", 1}}}},
      {{"id", "krylov-x1xn"}, {"estimate", "krylov"}, {"problem", half_x1xn}, {"grid", {{"n", kpair}}},
       {"options", {{"analytic", 1}}}},
      {{"id", "krylov-solved"}, {"estimate", "krylov"}, {"problem", krylov_solved}, {"grid", {{"n", kpair}}}},
      {{"id", "dini-tangent"}, {"estimate", "dini-tangent"}, {"problem", dini_data}, {"grid", {{"n", pair}}},
       {"modulus", {{"family", "holder"}, {"alpha", 0.5}, {"beta", 0.75}}}, {"options", {{"mu", 0.5}}}},
  });
}

inline json properties(std::size_t count, std::size_t pairs) {
  return json::array({{{"id", "operator-algebra"}, {"estimate", "operator-algebra"}, {"options", {{"count", count}}}},
                      {{"id", "comparison"}, {"estimate", "comparison"}, {"options", {{"pairs", pairs}, {"n", 16}}}}});
}

inline json concat(std::initializer_list<json> parts) {
  json out = json::array();
  for (const auto& p : parts)
    for (const auto& e : p) out.push_back(e);
  return out;
}

inline const std::map<std::string, std::string>& descriptions() {
  static const std::map<std::string, std::string> d{
      {"paper-core", "properties, solver oracle, barriers, moduli, lab checks and sharpness at modest resolution"},
      {"sharpness", "logarithmic counterexample: L^2 Laplacian with unbounded u(0,y)/y"},
      {"moduli", "holder(1/2), pure-dini(-2), mixed(1/2, +-1) through every modulus check"},
      {"solver-oracle", "harmonic annulus problem against ln(1/r)/ln 2 at h = 1/64, 1/128, 1/256"},
      {"barriers", "radial barrier geometry and distance control"},
      {"lab", "Hopf, boundary Harnack, Lipschitz, wedge, Krylov and Dini tangent checks"},
      {"properties", "operator algebra and discrete comparison principle"}};
  return d;
}

}  // namespace suites

/// Configuration document of a built-in suite.
inline json suite_config(const std::string& name) {
  json ex;
  if (name == "paper-core")
    ex = suites::concat({suites::properties(2000, 20), json::array({suites::harmonic_annulus({32, 64})}),
                         suites::barriers({16, 32, 64}), suites::moduli(), suites::lab(32), suites::sharpness()});
  else if (name == "sharpness") ex = suites::sharpness();
  else if (name == "moduli") ex = suites::moduli();
  else if (name == "solver-oracle") ex = json::array({suites::harmonic_annulus({64, 128, 256})});
  else if (name == "barriers") ex = suites::barriers({32, 64, 128});
  else if (name == "lab") ex = suites::lab(64);
  else if (name == "properties") ex = suites::properties(10000, 100);
  else throw std::invalid_argument("unknown suite '" + name + "'");
  return json{{"experiments", ex}, {"output_dir", "out"}};
}

inline std::vector<std::string> suite_names() {
  std::vector<std::string> v;
  for (const auto& [k, _] : suites::descriptions()) v.push_back(k);
  return v;
}

}  // namespace pucci
