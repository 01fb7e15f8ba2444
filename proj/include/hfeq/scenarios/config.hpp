#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hfeq/detection.hpp"
#include "hfeq/interferometer.hpp"
#include "hfeq/jsa.hpp"
#include "json.hpp"

namespace hfeq::scenarios {

// Boundary units: GHz (ordinary frequency), nm, ps, counts. The accessors
// return the internal rad/s and seconds forms.
struct SourceSettings {
  JsaModel model = JsaModel::gaussian;
  double signal_wavelength_nm = 1550.0;
  double idler_wavelength_nm = 1550.0;
  double single_photon_fwhm_ghz = 300.0;
  double pump_fwhm_ghz = 15.0;
  double pump_detuning_ghz = 0.0;  // ω_p minus (ω_s0 + ω_i0), ordinary GHz

  SpdcParams params() const;
};

struct InterferometerSettings {
  double tau_H_ps = 0.0;
  double tau_F_ps = 0.0;

  InterferometerConfig config() const;
};

struct GridSettings {
  std::size_t points = 512;
  double extent = 0.0;  // half-width in max(Δω_S, Δω_p); 0 = model default

  GridSpec spec() const { return {points, extent}; }
};

struct DetectionSettings {
  double slope_ns_per_nm = -1.58597;
  double intercept_ns = 2458.26;
  double jitter_ps = 49.1;
  double band_min_nm = 1540.0;
  double band_max_nm = 1560.0;
  double bin_width_ps = 0.0;  // 0 = jitter/4

  TofsCalibration calibration() const;
  Binning binning() const { return {bin_width_ps * 1e-12}; }
};

struct NoiseSettings {
  double background_per_bin = 0.0;
  double total_counts = 1e6;
};

struct ScenarioConfig {
  std::string scenario;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  SourceSettings source;
  InterferometerSettings interferometer;
  GridSettings grid;
  DetectionSettings detection;
  NoiseSettings noise;
  // Scenario-specific keys of the [scenario] table; scalars are length 1.
  std::map<std::string, std::vector<double>> params;
  std::vector<std::string> outputs;  // empty = every product the scenario offers

  NoiseModel noise_model() const { return {noise.background_per_bin, noise.total_counts, seed}; }
  double param(const std::string& key) const;
  const std::vector<double>& list(const std::string& key) const;
  bool wants(std::string_view product) const;
};

// Catalog defaults for a scenario name or alias; ConfigError when unknown.
ScenarioConfig default_config(std::string_view scenario);

// Strict TOML: unknown keys, wrong types and invalid values raise ConfigError
// citing the line and key.
ScenarioConfig parse_config(std::string_view text, std::string_view source_name = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

// Physics-level checks shared by parse_config and command-line overrides.
void validate(const ScenarioConfig& cfg);

// Effective configuration in boundary units, as echoed in the manifest.
nlohmann::json to_json(const ScenarioConfig& cfg);
std::string to_toml(const ScenarioConfig& cfg);

}  // namespace hfeq::scenarios
