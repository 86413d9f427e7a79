// Command-line front end: solve, verify, plot, moduli-check, list-suites.
// Exit codes: 0 all pass, 1 any failure, 2 configuration or usage error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "pucci/config.hpp"
#include "pucci/runner.hpp"
#include "pucci/suites.hpp"
#include "pucci/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace pucci;

namespace {

constexpr int kPass = 0, kFail = 1, kConfig = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Common {
  std::string config, out, suite;
  int grid = 0;
  double tol = 0.0;
  long long seed = -1;
};

// --grid N replaces each experiment's resolutions by N, 2N, ... keeping their count.
RunConfig load(const Common& c, bool allow_suite) {
  json doc;
  if (!c.suite.empty()) {
    if (!allow_suite) throw ConfigError("--suite", "not accepted by this verb");
    doc = suite_config(c.suite);
  } else if (!c.config.empty()) {
    try {
      doc = json::parse(read_file(c.config));
    } catch (const json::parse_error& e) {
      throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
  } else {
    throw ConfigError("--config", "a configuration file is required");
  }
  RunConfig cfg = RunConfig::parse(doc);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.tol > 0.0) cfg.tol = c.tol;
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  if (c.grid > 0)
    for (auto& e : cfg.experiments)
      if (e.grid) {
        const std::size_t k = e.grid->n.size();
        e.grid->n.clear();
        for (std::size_t i = 0; i < k; ++i) e.grid->n.push_back(c.grid << i);
      }
  return cfg;
}

void write_json(const fs::path& path, const json& j) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream o(path);
  o << j.dump(2) << "\n";
}

void print_summary(const json& report) {
  for (const auto& b : report["experiments"]) {
    std::cout << b["verdict"].get<std::string>() << "  " << b["id"].get<std::string>();
    if (b.contains("note")) std::cout << "  (" << b["note"].get<std::string>() << ")";
    std::cout << "\n";
  }
  std::cout << "overall: " << report["summary"]["overall"].get<std::string>() << "\n";
}

int cmd_verify(const Common& c) {
  const RunConfig cfg = load(c, true);
  const json report = run_all(cfg);
  write_json(fs::path(cfg.output_dir) / "report.json", report);
  print_summary(report);
  return report["summary"]["overall"] == "pass" ? kPass : kFail;
}

int cmd_solve(const Common& c) {
  const RunConfig cfg = load(c, false);
  fs::create_directories(cfg.output_dir);
  json blocks = json::array();
  runner::Context ctx{cfg.seed, cfg.tol, cfg.output_dir};
  for (const auto& e : cfg.experiments) {
    if (!e.problem) continue;
    ExperimentSpec s = e;
    s.estimate = "solve";
    blocks.push_back(run_experiment(s, ctx));
  }
  const json report{{"toolkit_version", kToolkitVersion}, {"config", cfg.to_json()}, {"experiments", blocks},
                    {"summary", summarize(blocks)}};
  write_json(fs::path(cfg.output_dir) / "solve_report.json", report);
  print_summary(report);
  return report["summary"]["overall"] == "pass" ? kPass : kFail;
}

int cmd_moduli(const Common& c) {
  RunConfig cfg;
  if (!c.config.empty()) {
    const RunConfig full = load(c, false);
    cfg.output_dir = full.output_dir;
    for (const auto& e : full.experiments)
      if (e.estimate == "moduli") cfg.experiments.push_back(e);
  } else {
    cfg = RunConfig::parse(suite_config("moduli"));
    if (!c.out.empty()) cfg.output_dir = c.out;
  }
  const json report = run_all(cfg);
  write_json(fs::path(cfg.output_dir) / "moduli_report.json", report);
  print_summary(report);
  return report["summary"]["overall"] == "pass" ? kPass : kFail;
}

int cmd_plot(const std::string& report_path, const std::string& id, const std::string& out) {
  json report;
  try {
    report = json::parse(read_file(report_path));
  } catch (const json::parse_error& e) {
    throw ConfigError("--report", std::string("malformed JSON: ") + e.what());
  }
  if (!report.contains("experiments")) throw ConfigError("--report", "no experiments in report");
  for (const auto& b : report["experiments"]) {
    if (b.value("id", "") != id) continue;
    if (!b.contains("series")) throw std::invalid_argument("experiment '" + id + "' has no series");
    PlotSeries s;
    s.x = b["series"]["x"].get<std::vector<double>>();
    s.y = b["series"]["y"].get<std::vector<double>>();
    s.xlabel = b["series"].value("xlabel", "x");
    s.ylabel = b["series"].value("ylabel", "y");
    s.title = id;
    const std::string svg = loglog_svg(s);
    const fs::path dir = out.empty() ? fs::path(report_path).parent_path() : fs::path(out);
    if (!dir.empty()) fs::create_directories(dir);
    const fs::path path = dir / (id + ".svg");
    std::ofstream(path) << svg;
    std::cout << path.string() << "\n";
    return kPass;
  }
  throw ConfigError("--experiment", "no experiment '" + id + "' in report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pucci-class boundary regularity lab"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* s, bool suite) {
    s->add_option("--config", c.config, "run configuration (JSON)");
    s->add_option("--out", c.out, "output directory");
    s->add_option("--grid", c.grid, "base resolution n (h = 1/n)")->check(CLI::Range(4, 4096));
    s->add_option("--tol", c.tol, "solver residual tolerance")->check(CLI::PositiveNumber);
    s->add_option("--seed", c.seed, "seed for randomized suites")->check(CLI::NonNegativeNumber);
    if (suite) s->add_option("--suite", c.suite, "built-in suite name");
  };
  auto* solve = app.add_subcommand("solve", "solve every configured problem, write CSV and convergence JSON");
  add_common(solve, false);
  auto* verify = app.add_subcommand("verify", "run checks and write report.json");
  add_common(verify, true);
  auto* moduli = app.add_subcommand("moduli-check", "run the modulus checks");
  add_common(moduli, false);
  std::string report_path, exp_id, plot_out;
  auto* plot = app.add_subcommand("plot", "log-log SVG of an experiment series from a report");
  plot->add_option("--report,--config", report_path, "report.json produced by verify")->required();
  plot->add_option("--experiment", exp_id, "experiment id")->required();
  plot->add_option("--out", plot_out, "output directory");
  auto* list = app.add_subcommand("list-suites", "print built-in suite names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfig;
  }
  try {
    if (*list) {
      for (const auto& [name, text] : suites::descriptions()) std::cout << name << "  " << text << "\n";
      return kPass;
    }
    if (*solve) return cmd_solve(c);
    if (*verify) return cmd_verify(c);
    if (*moduli) return cmd_moduli(c);
    if (*plot) return cmd_plot(report_path, exp_id, plot_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kConfig;
}
