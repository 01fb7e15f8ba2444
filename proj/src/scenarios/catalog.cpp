#include "hfeq/scenarios/catalog.hpp"

#include <chrono>
#include <cmath>
#include <ctime>

#include "hfeq/errors.hpp"
#include "hfeq/parallel.hpp"
#include "runners.hpp"

namespace hfeq::scenarios {

namespace {

ParamSpec scalar(std::string key, double v, std::string unit, std::string help) {
  return {std::move(key), {v}, std::move(unit), std::move(help), false};
}

ParamSpec list(std::string key, std::vector<double> v, std::string unit, std::string help) {
  return {std::move(key), std::move(v), std::move(unit), std::move(help), true};
}

std::vector<ScenarioInfo> build_catalog() {
  std::vector<ScenarioInfo> c;
  c.push_back({"fig2",
               {},
               "comb dimension",
               "HOM-filtered JSIs and single-mode spectra; frequency-bin dimension against tau_H",
               {list("tau_H_times_bandwidth", {0.0, 12.0, 20.0}, "1/dw_S", "HOM delays"),
                scalar("threshold", 0.05, "", "bin weight threshold relative to the largest bin")},
               {"jsi", "spectrum"},
               [](ScenarioConfig& cfg) { cfg.grid.points = 256; },
               runners::fig2});
  c.push_back({"fig3",
               {},
               "visibility and frequency correlation",
               "HOM visibility, Schmidt number and dimension over a pump-bandwidth ladder",
               {scalar("tau_H_times_bandwidth", 16.0, "1/dw_S", "HOM delay"),
                list("pump_ratios", {1.0, 0.5, 0.2, 0.1, 0.05}, "dw_S", "pump bandwidths"),
                scalar("extent_over_bandwidth", 1.5, "dw_S", "grid half-width")},
               {"jsi", "curve"},
               [](ScenarioConfig& cfg) { cfg.grid.points = 384; },
               runners::fig3});
  c.push_back({"fig4",
               {},
               "HOM and Franson interference",
               "JSIs under HOM and Franson interference; Franson fringes for narrow and broad pumps",
               {scalar("tau_H_times_bandwidth", 12.0, "1/dw_S", "HOM delay"),
                scalar("tau_F_times_bandwidth", 20.0, "1/dw_S", "Franson delay"),
                list("pump_ratios", {0.05, 1.0}, "dw_S", "pump bandwidths for the fringes"),
                scalar("scan_points", 41, "", "fringe samples"),
                scalar("scan_periods", 3.0, "2pi/w_p", "fringe scan length")},
               {"jsi", "fringe", "fit"},
               [](ScenarioConfig& cfg) { cfg.grid.points = 256; },
               runners::fig4});
  c.push_back({"fig5",
               {},
               "detector jitter",
               "Jitter-limited HOM visibility against tau_H with the closed-form attenuation",
               {scalar("pump_ratio", 0.001, "dw_S", "pump bandwidth"),
                scalar("blur_ghz", 4.0, "GHz", "spectral blur FWHM"),
                scalar("extent_over_bandwidth", 1.5, "dw_S", "grid half-width"),
                list("tau_H_ps_range", {2.0, 18.0}, "ps", "[min, max] HOM delay"),
                scalar("points", 33, "", "delays in the curve"),
                scalar("probe_tau_H_ps", 16.5, "ps", "delay reported on its own")},
               {"curve"},
               [](ScenarioConfig& cfg) { cfg.grid.points = 1024; },
               runners::fig5});
  c.push_back({"appendixA",
               {"fig6"},
               "satellite JSIs",
               "Satellite JSIs: null at tau_H = 0, comb otherwise, non-degenerate pair",
               {list("tau_H_times_bandwidth", {0.0, 10.0}, "1/dw_S", "HOM delays for the degenerate pair"),
                scalar("nondegenerate_offset_times_bandwidth", 3.0, "dw_S", "signal-idler centre offset"),
                scalar("nondegenerate_tau_H_times_bandwidth", 10.0, "1/dw_S", "HOM delay for the offset pair")},
               {"jsi"},
               [](ScenarioConfig& cfg) { cfg.grid.points = 256; },
               runners::appendix_a});
  c.push_back({"appendixB",
               {},
               "grid state",
               "Grid-like JSI at tau_F = tau_H with dw_p = dw_S and its lattice of maxima",
               {scalar("pump_ratio", 1.0, "dw_S", "pump bandwidth"),
                scalar("tau_times_bandwidth", 24.0, "1/dw_S", "common HOM and Franson delay"),
                scalar("maxima_threshold", 0.2, "", "reported maxima relative to the peak")},
               {"jsi"},
               [](ScenarioConfig& cfg) { cfg.grid.points = 512; },
               runners::appendix_b});
  c.push_back({"appendixC",
               {},
               "ToFS detection",
               "ToFS resolution chain, calibration fit and a jittered comb histogram",
               {scalar("calibration_points", 11, "", "calibration wavelengths"),
                scalar("calibration_span_nm", 20.0, "nm", "calibration span"),
                scalar("timing_noise_ps", 20.0, "ps", "arrival-time noise of the calibration"),
                scalar("comb_visibility", 1.0, "", "intrinsic comb visibility"),
                scalar("comb_tau_H_ps", 8.27, "ps", "comb HOM delay")},
               {"histogram", "fit"},
               [](ScenarioConfig& cfg) { cfg.grid.points = 4096; },
               runners::appendix_c});
  c.push_back({"appendixF",
               {"fig9"},
               "sinc JSA",
               "Sinc JSA across degeneracy: comb contrast, exchange overlap and spectral lobes",
               {scalar("pump_ratio", 0.05, "dw_S", "pump bandwidth"),
                scalar("tau_H_times_bandwidth", 4.0, "1/dw_S", "HOM delay"),
                list("offsets_times_bandwidth", {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}, "dw_S", "signal-idler centre offsets")},
               {"spectrum", "curve"},
               [](ScenarioConfig& cfg) {
                 cfg.source.model = JsaModel::sinc;
                 cfg.grid.points = 2048;
               },
               runners::appendix_f});
  c.push_back({"appendixG",
               {},
               "pump-frequency phase control",
               "Franson phase control by scanning the pump frequency",
               {scalar("scan_points", 41, "", "scan samples"),
                scalar("scan_periods", 2.0, "2pi/tau_F", "scan length")},
               {"fringe", "fit"},
               [](ScenarioConfig& cfg) {
                 cfg.source.single_photon_fwhm_ghz = 4.0;
                 cfg.source.pump_fwhm_ghz = 0.05;
                 cfg.interferometer.tau_F_ps = 2000.0;
                 cfg.grid.points = 400;
               },
               runners::appendix_g});
  c.push_back({"appendixH",
               {},
               "per-bin entanglement",
               "Per-bin Schmidt numbers and Franson fringe phases of the comb",
               {scalar("pump_ratio", 0.05, "dw_S", "pump bandwidth"),
                scalar("tau_H_times_bandwidth", 12.0, "1/dw_S", "HOM delay"),
                scalar("tau_F_times_bandwidth", 10.0, "1/dw_S", "start of the Franson scan"),
                scalar("scan_points", 41, "", "fringe samples"),
                scalar("scan_periods", 3.0, "2pi/w_p", "fringe scan length")},
               {"fringe", "schmidt"},
               [](ScenarioConfig& cfg) { cfg.grid.points = 384; },
               runners::appendix_h});
  c.push_back({"table1",
               {},
               "delay table",
               "Mode spacing, dimension, jitter-limited V_H and the K_F lower bound per delay",
               {scalar("pump_ratio", 0.05, "dw_S", "pump bandwidth for the dimension"),
                scalar("blur_ghz", 3.87, "GHz", "spectral blur FWHM"),
                list("tau_H_ps", {6.14, 8.27, 13.8, 16.5}, "ps", "HOM delays"),
                list("measured_visibility", {0.972, 0.9886, 0.9603, 0.9324}, "", "visibilities to invert"),
                scalar("kf_ladder_points", 13, "", "pump ladder length"),
                scalar("kf_schmidt_points", 256, "", "grid for K_F"),
                scalar("kf_spectrum_points", 1024, "", "grid for V_H")},
               {"curve"},
               [](ScenarioConfig& cfg) { cfg.grid.points = 512; },
               runners::table1});
  return c;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Mirrored targets are named by the scenario identifier and its aliases.
nlohmann::json mirrors(const ScenarioInfo& info) {
  nlohmann::json m = nlohmann::json::array({info.name});
  for (const auto& a : info.aliases) m.push_back(a);
  return m;
}

struct ThreadGuard {
  unsigned saved = parallel::thread_count();
  ~ThreadGuard() { parallel::set_thread_count(saved); }
};

}  // namespace

void Report::check(const std::string& name, double value, double lo, double hi) {
  std::string expectation;
  if (lo == hi)
    expectation = "== " + format_number(lo);
  else if (std::isinf(hi))
    expectation = ">= " + format_number(lo);
  else
    expectation = "in [" + format_number(lo) + ", " + format_number(hi) + "]";
  checks.push_back({name, value, expectation, value >= lo && value <= hi});
}

const std::vector<ScenarioInfo>& catalog() {
  static const std::vector<ScenarioInfo> c = build_catalog();
  return c;
}

const ScenarioInfo* find_scenario(std::string_view name) {
  for (const auto& s : catalog()) {
    if (s.name == name) return &s;
    for (const auto& a : s.aliases)
      if (a == name) return &s;
  }
  return nullptr;
}

RunResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
  const ScenarioInfo* info = find_scenario(cfg.scenario);
  if (!info) throw ConfigError("unknown scenario '" + cfg.scenario + "'");
  validate(cfg);

  ThreadGuard guard;
  parallel::set_thread_count(static_cast<unsigned>(cfg.threads));

  OutputSink sink(out_dir);
  Report rep;
  try {
    info->run(cfg, sink, rep);
  } catch (const Error& e) {
    throw_error(e.kind(), "scenario " + info->name + ": " + e.what());
  }

  nlohmann::json checks = nlohmann::json::array();
  bool all = true;
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"expected", c.expectation}, {"pass", c.pass}});
    all = all && c.pass;
  }
  nlohmann::json report = {{"scenario", info->name}, {"results", rep.results}, {"checks", checks}, {"checks_passed", all}};
  sink.json("report.json", "report", "scalar results and self-checks", report);
  sink.text("config.toml", "config", "effective configuration", to_toml(cfg));

  nlohmann::json manifest = {{"scenario", info->name},
                             {"mirrors", mirrors(*info)},
                             {"topic", info->topic},
                             {"summary", info->summary},
                             {"config", to_json(cfg)},
                             {"files", sink.files()},
                             {"checks_passed", all},
                             {"generated_at", utc_timestamp()}};
  const auto path = out_dir / "manifest.json";
  sink.json("manifest.json", "manifest", "index of this run", manifest);
  return {path, report, all};
}

}  // namespace hfeq::scenarios
