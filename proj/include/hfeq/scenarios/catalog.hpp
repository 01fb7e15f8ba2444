#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hfeq/scenarios/config.hpp"
#include "hfeq/scenarios/output.hpp"
#include "json.hpp"

namespace hfeq::scenarios {

struct ParamSpec {
  std::string key;
  std::vector<double> defaults;
  std::string unit;
  std::string help;
  bool is_list = false;
};

struct Check {
  std::string name;
  double value = 0.0;
  std::string expectation;
  bool pass = false;
};

// What a runner hands back besides its files.
struct Report {
  nlohmann::json results = nlohmann::json::object();
  std::vector<Check> checks;

  void check(const std::string& name, double value, double lo, double hi);
};

struct ScenarioInfo {
  std::string name;
  std::vector<std::string> aliases;
  std::string topic;
  std::string summary;
  std::vector<ParamSpec> params;
  std::vector<std::string> products;
  std::function<void(ScenarioConfig&)> defaults;  // overrides of the global defaults
  std::function<void(const ScenarioConfig&, OutputSink&, Report&)> run;
};

const std::vector<ScenarioInfo>& catalog();
const ScenarioInfo* find_scenario(std::string_view name);

struct RunResult {
  std::filesystem::path manifest;
  nlohmann::json report;
  bool checks_passed = true;
};

// Writes the products, report.json and manifest.json into out_dir. Library
// errors are re-thrown with the scenario name prefixed and their kind kept.
RunResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace hfeq::scenarios
