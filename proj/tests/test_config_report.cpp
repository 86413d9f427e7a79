#include <gtest/gtest.h>

#include "pucci/config.hpp"
#include "pucci/runner.hpp"
#include "pucci/suites.hpp"
#include "pucci/svg_plot.hpp"

using namespace pucci;

namespace {

const char* kSmall = R"({
  "seed": 4,
  "output_dir": "out",
  "experiments": [
    {"id": "alg", "estimate": "operator-algebra", "options": {"count": 200, "diagonal_count": 20}},
    {"id": "mod", "estimate": "moduli", "modulus": {"family": "holder", "alpha": 0.5, "beta": 0.9},
     "options": {"samples": 200}},
    {"id": "lin", "estimate": "solve",
     "problem": {"domain": "ball", "boundary": {"kind": "linear", "coeffs": [1, 2], "offset": 0.5},
                 "reference": {"kind": "linear", "coeffs": [1, 2], "offset": 0.5}},
     "grid": {"n": [8, 16]}, "options": {"max_error": 1e-8}}
  ]
})";

std::string config_error_path(const std::string& text) {
  try {
    RunConfig::parse_text(text);
  } catch (const ConfigError& e) {
    return e.path;
  }
  return "";
}

}  // namespace

TEST(Config, RoundTripIsIdentity) {
  const auto a = RunConfig::parse_text(kSmall);
  const json once = a.to_json();
  const json twice = RunConfig::parse(once).to_json();
  EXPECT_EQ(once.dump(), twice.dump());
  EXPECT_EQ(a.experiments.size(), 3u);
  EXPECT_EQ(a.seed, 4u);
}

TEST(Config, SuitesParse) {
  for (const auto& name : suite_names()) EXPECT_NO_THROW(RunConfig::parse(suite_config(name))) << name;
  EXPECT_THROW(suite_config("nope"), std::invalid_argument);
}

TEST(Config, ErrorsCarryPaths) {
  EXPECT_EQ(config_error_path("{\"experiments\": 3}"), "config.experiments");
  EXPECT_EQ(config_error_path(R"({"experiments": [{"id": "a", "estimate": "bogus"}]})"),
            "config.experiments[0].estimate");
  EXPECT_EQ(config_error_path(R"({"experiments": [{"id": "a", "estimate": "solve"}]})"),
            "config.experiments[0].problem");
  EXPECT_EQ(config_error_path(R"({"experiments": [], "colour": 1})"), "config.colour");
  EXPECT_EQ(config_error_path("{not json"), "config");
  EXPECT_EQ(config_error_path(R"({"experiments": [{"id": "a", "estimate": "moduli"}, {"id": "a", "estimate": "moduli"}]})"),
            "config.experiments[1].id");
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW(RunConfig::parse_text(R"({"experiments": [{"id": "s", "estimate": "solve",
    "problem": {"domain": "ball", "dim": 4, "boundary": {"kind": "constant", "value": 0}}}]})"),
               ConfigError);
  EXPECT_THROW(RunConfig::parse_text(R"({"experiments": [{"id": "s", "estimate": "solve",
    "problem": {"domain": "cube", "boundary": {"kind": "constant", "value": 0}}}]})"),
               ConfigError);
  EXPECT_THROW(RunConfig::parse_text(R"({"experiments": [{"id": "s", "estimate": "solve",
    "problem": {"domain": "ball", "lambda": 2, "Lambda": 1, "boundary": {"kind": "constant", "value": 0}}}]})"),
               ConfigError);
  EXPECT_THROW(RunConfig::parse_text(R"({"experiments": [{"id": "s", "estimate": "solve",
    "problem": {"domain": "ball", "boundary": {"kind": "constant", "value": 0}}, "grid": {"n": 2}}]})"),
               ConfigError);
  EXPECT_THROW(RunConfig::parse_text(R"({"experiments": [{"id": "k", "estimate": "krylov", "options": {"k_max": 6},
    "problem": {"domain": "half_ball", "boundary": {"kind": "constant", "value": 0}}, "grid": {"n": 16}}]})"),
               ConfigError);
}

TEST(Report, EmptyExperimentListPasses) {
  const auto cfg = RunConfig::parse_text(R"({"experiments": []})");
  const json r = run_all(cfg);
  EXPECT_TRUE(r["experiments"].empty());
  EXPECT_EQ(r["summary"]["overall"], "pass");
}

TEST(Report, SameSeedGivesIdenticalBytes) {
  const auto cfg = RunConfig::parse_text(kSmall);
  const std::string a = run_all(cfg).dump(2), b = run_all(cfg).dump(2);
  EXPECT_EQ(a, b);
}

TEST(Report, BlocksCarryVerdictsAndInputs) {
  const json r = run_all(RunConfig::parse_text(kSmall));
  ASSERT_EQ(r["experiments"].size(), 3u);
  for (const auto& b : r["experiments"]) {
    EXPECT_EQ(b["verdict"], "pass") << b.dump();
    EXPECT_TRUE(b.contains("inputs"));
    EXPECT_TRUE(b.contains("measured_constants"));
  }
  EXPECT_EQ(r["summary"]["pass"], 3);
  EXPECT_EQ(r["toolkit_version"], kToolkitVersion);
}

TEST(Report, FailureInsideExperimentIsRecorded) {
  // wedge needs |u| <= x_n, violated by 2 x_n
  const auto cfg = RunConfig::parse_text(R"({"experiments": [{"id": "w", "estimate": "wedge",
    "problem": {"domain": "half_ball", "boundary": {"kind": "height"}, "reference": {"kind": "linear", "coeffs": [0, 2]}},
    "grid": {"n": 16}, "options": {"analytic": 1}}]})");
  const json r = run_all(cfg);
  EXPECT_EQ(r["experiments"][0]["verdict"], "fail");
  EXPECT_FALSE(r["experiments"][0]["note"].get<std::string>().empty());
  EXPECT_EQ(r["summary"]["overall"], "fail");
}

TEST(Report, VacuousDoesNotFailSummary) {
  const json blocks = json::array({json{{"verdict", "pass"}}, json{{"verdict", "vacuous"}}});
  EXPECT_EQ(summarize(blocks)["overall"], "pass");
  const json bad = json::array({json{{"verdict", "pass"}}, json{{"verdict", "inconclusive"}}});
  EXPECT_EQ(summarize(bad)["overall"], "fail");
}

TEST(Svg, ErrorsAndOutput) {
  EXPECT_THROW(loglog_svg(PlotSeries{}), std::invalid_argument);
  PlotSeries one{{1.0}, {2.0}, "x", "y", ""};
  EXPECT_THROW(loglog_svg(one), std::invalid_argument);
  PlotSeries bad{{1.0, 2.0}, {1.0}, "x", "y", ""};
  EXPECT_THROW(loglog_svg(bad), std::invalid_argument);
  PlotSeries s{{0.1, 0.01, 0.001}, {0.2, 0.02, 0.002}, "h", "error", "conv <1>"};
  const std::string svg = loglog_svg(s);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("slope 1,"), std::string::npos);
  EXPECT_NE(svg.find("conv &lt;1&gt;"), std::string::npos);
}
