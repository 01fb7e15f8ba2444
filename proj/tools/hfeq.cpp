#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hfeq/errors.hpp"
#include "hfeq/scenarios/catalog.hpp"
#include "hfeq/scenarios/config.hpp"

namespace fs = std::filesystem;
using namespace hfeq;
using namespace hfeq::scenarios;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::numeric:
    case ErrorKind::resolution:
    case ErrorKind::truncation:
    case ErrorKind::degenerate_input: return 3;
    default: return 4;
  }
}

bool is_config_path(const std::string& arg) {
  return arg.ends_with(".toml") || (arg.find('/') != std::string::npos && fs::exists(arg));
}

struct RunArgs {
  std::string target;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid;
  std::optional<int> threads;
};

int do_run(const RunArgs& a) {
  ScenarioConfig cfg = is_config_path(a.target) ? load_config(a.target) : default_config(a.target);
  if (a.seed) cfg.seed = *a.seed;
  if (a.grid) cfg.grid.points = *a.grid;
  if (a.threads) cfg.threads = *a.threads;
  validate(cfg);
  const fs::path out = a.out.empty() ? fs::path("out") / cfg.scenario : fs::path(a.out);
  const RunResult r = run_scenario(cfg, out);
  std::cout << "scenario " << cfg.scenario << " -> " << out.string() << "\n";
  for (const auto& c : r.report.at("checks"))
    std::cout << (c.at("pass").get<bool>() ? "  ok   " : "  FAIL ") << c.at("name").get<std::string>() << ": "
              << c.at("value").dump() << " (expected " << c.at("expected").get<std::string>() << ")\n";
  std::cout << "manifest: " << r.manifest.string() << "\n";
  return 0;
}

int do_list(bool verbose) {
  for (const auto& s : catalog()) {
    std::cout << s.name;
    for (const auto& a : s.aliases) std::cout << " (" << a << ")";
    std::cout << ": " << s.summary << "\n";
    if (!verbose) continue;
    std::cout << "    products:";
    for (const auto& p : s.products) std::cout << " " << p;
    std::cout << "\n";
    for (const auto& p : s.params) {
      std::cout << "    " << p.key << " = ";
      if (p.is_list) std::cout << "[";
      for (std::size_t k = 0; k < p.defaults.size(); ++k) std::cout << (k ? ", " : "") << format_number(p.defaults[k]);
      if (p.is_list) std::cout << "]";
      if (!p.unit.empty()) std::cout << " " << p.unit;
      std::cout << "  # " << p.help << "\n";
    }
  }
  return 0;
}

int do_validate(const std::string& path, bool echo) {
  const ScenarioConfig cfg = load_config(path);
  std::cout << path << ": ok (scenario " << cfg.scenario << ")\n";
  if (echo) std::cout << to_toml(cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hfeq: two-photon frequency-entanglement simulator and analysis pipeline"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a catalog scenario or a TOML config");
  run->add_option("target", run_args.target, "scenario name or path to a .toml config")->required();
  run->add_option("--out", run_args.out, "output directory (default out/<scenario>)");
  run->add_option("--seed", run_args.seed, "random seed override");
  run->add_option("--grid", run_args.grid, "grid points per axis override");
  run->add_option("--threads", run_args.threads, "worker threads (0 = all cores)");

  bool verbose = false;
  auto* list = app.add_subcommand("list", "List the scenario catalog");
  list->add_flag("-v,--verbose", verbose, "show products and parameter defaults");

  std::string validate_path;
  bool echo = false;
  auto* val = app.add_subcommand("validate", "Parse and check a config without running it");
  val->add_option("config", validate_path, "path to a .toml config")->required();
  val->add_flag("--echo", echo, "print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) return do_run(run_args);
    if (*list) return do_list(verbose);
    if (*val) return do_validate(validate_path, echo);
  } catch (const Error& e) {
    std::cerr << "hfeq: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "hfeq: error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
