#include "hfeq/scenarios/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hfeq/errors.hpp"
#include "hfeq/scenarios/catalog.hpp"
#include "hfeq/scenarios/output.hpp"
#include "hfeq/units.hpp"
#include "toml.hpp"

namespace hfeq::scenarios {

SpdcParams SourceSettings::params() const {
  SpdcParams p;
  p.model = model;
  p.omega_s0 = units::wavelength_nm_to_angular(signal_wavelength_nm);
  p.omega_i0 = units::wavelength_nm_to_angular(idler_wavelength_nm);
  p.single_photon_fwhm = units::ghz_to_angular(single_photon_fwhm_ghz);
  p.pump_fwhm = units::ghz_to_angular(pump_fwhm_ghz);
  if (pump_detuning_ghz != 0.0) p.pump_center = p.omega_s0 + p.omega_i0 + units::ghz_to_angular(pump_detuning_ghz);
  return p;
}

InterferometerConfig InterferometerSettings::config() const {
  InterferometerConfig c;
  c.tau_H = tau_H_ps * 1e-12;
  c.tau_F = tau_F_ps * 1e-12;
  return c;
}

TofsCalibration DetectionSettings::calibration() const {
  return {slope_ns_per_nm, intercept_ns, jitter_ps * 1e-12, band_min_nm, band_max_nm};
}

double ScenarioConfig::param(const std::string& key) const {
  const auto& v = list(key);
  if (v.size() != 1) throw ConfigError("params." + key + ": expected a single number");
  return v.front();
}

const std::vector<double>& ScenarioConfig::list(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw ConfigError("params." + key + ": not set for scenario " + scenario);
  return it->second;
}

bool ScenarioConfig::wants(std::string_view product) const {
  return outputs.empty() || std::find(outputs.begin(), outputs.end(), product) != outputs.end();
}

ScenarioConfig default_config(std::string_view scenario) {
  const ScenarioInfo* info = find_scenario(scenario);
  if (!info) throw ConfigError("unknown scenario '" + std::string(scenario) + "' (see `hfeq list`)");
  ScenarioConfig cfg;
  cfg.scenario = info->name;
  for (const auto& p : info->params) cfg.params[p.key] = p.defaults;
  if (info->defaults) info->defaults(cfg);
  return cfg;
}

namespace {

const char* model_name(JsaModel m) { return m == JsaModel::sinc ? "sinc" : "gaussian"; }

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const toml::node& n, const std::string& key, const std::string& msg) const {
    std::ostringstream os;
    os << source_ << ":" << n.source().begin.line << ": key '" << key << "': " << msg;
    throw ConfigError(os.str());
  }

  double number(const toml::node& n, const std::string& key) const {
    if (auto v = n.value<double>(); v && (n.is_integer() || n.is_floating_point())) {
      if (!std::isfinite(*v)) fail(n, key, "must be finite");
      return *v;
    }
    fail(n, key, "expected a number");
  }

  double positive(const toml::node& n, const std::string& key) const {
    const double v = number(n, key);
    if (!(v > 0.0)) fail(n, key, "must be > 0");
    return v;
  }

  double non_negative(const toml::node& n, const std::string& key) const {
    const double v = number(n, key);
    if (!(v >= 0.0)) fail(n, key, "must be >= 0");
    return v;
  }

  std::int64_t integer(const toml::node& n, const std::string& key, std::int64_t lo, std::int64_t hi) const {
    if (!n.is_integer()) fail(n, key, "expected an integer");
    const auto v = *n.value<std::int64_t>();
    if (v < lo || v > hi) fail(n, key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }

  std::string string(const toml::node& n, const std::string& key) const {
    if (!n.is_string()) fail(n, key, "expected a string");
    return *n.value<std::string>();
  }

  const toml::table& table(const toml::node& n, const std::string& key) const {
    if (!n.is_table()) fail(n, key, "expected a table");
    return *n.as_table();
  }

 private:
  std::string source_;
};

template <typename Handlers>
void read_table(const Reader& rd, const toml::table& t, const std::string& prefix, const Handlers& handlers) {
  for (const auto& [k, node] : t) {
    const std::string key(k.str());
    const auto it = handlers.find(key);
    if (it == handlers.end()) rd.fail(node, prefix + key, "unknown key");
    it->second(node, prefix + key);
  }
}

using Handler = std::function<void(const toml::node&, const std::string&)>;
using HandlerMap = std::map<std::string, Handler>;

}  // namespace

ScenarioConfig parse_config(std::string_view text, std::string_view source_name) {
  const std::string src(source_name);
  toml::table root;
  try {
    root = toml::parse(text, src);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << src << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
    throw ConfigError(os.str());
  }
  const Reader rd(src);

  const toml::node* name_node = root.get("scenario");
  if (!name_node) throw ConfigError(src + ": missing required key 'scenario'");
  const std::string name = rd.string(*name_node, "scenario");
  const ScenarioInfo* info = find_scenario(name);
  if (!info) rd.fail(*name_node, "scenario", "unknown scenario '" + name + "'");
  ScenarioConfig cfg = default_config(name);

  HandlerMap source{
      {"model", [&](const toml::node& n, const std::string& k) {
         const std::string m = rd.string(n, k);
         if (m == "gaussian") cfg.source.model = JsaModel::gaussian;
         else if (m == "sinc") cfg.source.model = JsaModel::sinc;
         else rd.fail(n, k, "expected \"gaussian\" or \"sinc\"");
       }},
      {"signal_wavelength_nm", [&](const toml::node& n, const std::string& k) { cfg.source.signal_wavelength_nm = rd.positive(n, k); }},
      {"idler_wavelength_nm", [&](const toml::node& n, const std::string& k) { cfg.source.idler_wavelength_nm = rd.positive(n, k); }},
      {"single_photon_fwhm_ghz", [&](const toml::node& n, const std::string& k) { cfg.source.single_photon_fwhm_ghz = rd.positive(n, k); }},
      {"pump_fwhm_ghz", [&](const toml::node& n, const std::string& k) { cfg.source.pump_fwhm_ghz = rd.positive(n, k); }},
      {"pump_detuning_ghz", [&](const toml::node& n, const std::string& k) { cfg.source.pump_detuning_ghz = rd.number(n, k); }},
  };
  HandlerMap interferometer{
      {"tau_H_ps", [&](const toml::node& n, const std::string& k) { cfg.interferometer.tau_H_ps = rd.number(n, k); }},
      {"tau_F_ps", [&](const toml::node& n, const std::string& k) { cfg.interferometer.tau_F_ps = rd.number(n, k); }},
  };
  HandlerMap grid{
      {"points", [&](const toml::node& n, const std::string& k) { cfg.grid.points = static_cast<std::size_t>(rd.integer(n, k, 16, 8192)); }},
      {"extent", [&](const toml::node& n, const std::string& k) { cfg.grid.extent = rd.non_negative(n, k); }},
  };
  HandlerMap detection{
      {"slope_ns_per_nm", [&](const toml::node& n, const std::string& k) {
         cfg.detection.slope_ns_per_nm = rd.number(n, k);
         if (cfg.detection.slope_ns_per_nm == 0.0) rd.fail(n, k, "must be non-zero");
       }},
      {"intercept_ns", [&](const toml::node& n, const std::string& k) { cfg.detection.intercept_ns = rd.number(n, k); }},
      {"jitter_ps", [&](const toml::node& n, const std::string& k) { cfg.detection.jitter_ps = rd.non_negative(n, k); }},
      {"band_min_nm", [&](const toml::node& n, const std::string& k) { cfg.detection.band_min_nm = rd.positive(n, k); }},
      {"band_max_nm", [&](const toml::node& n, const std::string& k) { cfg.detection.band_max_nm = rd.positive(n, k); }},
      {"bin_width_ps", [&](const toml::node& n, const std::string& k) { cfg.detection.bin_width_ps = rd.non_negative(n, k); }},
  };
  HandlerMap noise{
      {"background_per_bin", [&](const toml::node& n, const std::string& k) { cfg.noise.background_per_bin = rd.non_negative(n, k); }},
      {"total_counts", [&](const toml::node& n, const std::string& k) { cfg.noise.total_counts = rd.positive(n, k); }},
  };
  HandlerMap params;
  for (const auto& spec : info->params) {
    params[spec.key] = [&, spec](const toml::node& n, const std::string& k) {
      std::vector<double> v;
      if (const auto* arr = n.as_array()) {
        if (!spec.is_list) rd.fail(n, k, "expected a single number");
        for (const auto& e : *arr) v.push_back(rd.number(e, k));
        if (v.empty()) rd.fail(n, k, "list must not be empty");
      } else {
        v.push_back(rd.number(n, k));
      }
      cfg.params[spec.key] = std::move(v);
    };
  }

  HandlerMap top{
      {"scenario", [](const toml::node&, const std::string&) {}},
      {"seed", [&](const toml::node& n, const std::string& k) {
         cfg.seed = static_cast<std::uint64_t>(rd.integer(n, k, 0, std::numeric_limits<std::int64_t>::max()));
       }},
      {"threads", [&](const toml::node& n, const std::string& k) { cfg.threads = static_cast<int>(rd.integer(n, k, 0, 1024)); }},
      {"outputs", [&](const toml::node& n, const std::string& k) {
         const auto* arr = n.as_array();
         if (!arr) rd.fail(n, k, "expected an array of strings");
         cfg.outputs.clear();
         for (const auto& e : *arr) {
           const std::string p = rd.string(e, k);
           if (std::find(info->products.begin(), info->products.end(), p) == info->products.end())
             rd.fail(e, k, "scenario " + info->name + " does not produce '" + p + "'");
           cfg.outputs.push_back(p);
         }
       }},
      {"source", [&](const toml::node& n, const std::string& k) { read_table(rd, rd.table(n, k), "source.", source); }},
      {"interferometer", [&](const toml::node& n, const std::string& k) { read_table(rd, rd.table(n, k), "interferometer.", interferometer); }},
      {"grid", [&](const toml::node& n, const std::string& k) { read_table(rd, rd.table(n, k), "grid.", grid); }},
      {"detection", [&](const toml::node& n, const std::string& k) { read_table(rd, rd.table(n, k), "detection.", detection); }},
      {"noise", [&](const toml::node& n, const std::string& k) { read_table(rd, rd.table(n, k), "noise.", noise); }},
      {"params", [&](const toml::node& n, const std::string& k) { read_table(rd, rd.table(n, k), "params.", params); }},
  };
  read_table(rd, root, "", top);

  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    throw ConfigError(src + ": " + e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

void validate(const ScenarioConfig& cfg) {
  const ScenarioInfo* info = find_scenario(cfg.scenario);
  if (!info) throw ConfigError("unknown scenario '" + cfg.scenario + "'");
  auto need = [](bool ok, const std::string& key, const std::string& msg) {
    if (!ok) throw ConfigError("key '" + key + "': " + msg);
  };
  const auto& s = cfg.source;
  need(s.signal_wavelength_nm > 0.0 && std::isfinite(s.signal_wavelength_nm), "source.signal_wavelength_nm", "must be > 0");
  need(s.idler_wavelength_nm > 0.0 && std::isfinite(s.idler_wavelength_nm), "source.idler_wavelength_nm", "must be > 0");
  need(s.single_photon_fwhm_ghz > 0.0 && std::isfinite(s.single_photon_fwhm_ghz), "source.single_photon_fwhm_ghz", "must be > 0");
  need(s.pump_fwhm_ghz > 0.0 && std::isfinite(s.pump_fwhm_ghz), "source.pump_fwhm_ghz", "must be > 0");
  need(std::isfinite(s.pump_detuning_ghz), "source.pump_detuning_ghz", "must be finite");
  need(std::isfinite(cfg.interferometer.tau_H_ps), "interferometer.tau_H_ps", "must be finite");
  need(std::isfinite(cfg.interferometer.tau_F_ps), "interferometer.tau_F_ps", "must be finite");
  need(cfg.grid.points >= 16 && cfg.grid.points <= 8192, "grid.points", "must lie in [16, 8192]");
  need(cfg.grid.extent >= 0.0 && std::isfinite(cfg.grid.extent), "grid.extent", "must be >= 0");
  const auto& d = cfg.detection;
  need(d.slope_ns_per_nm != 0.0 && std::isfinite(d.slope_ns_per_nm), "detection.slope_ns_per_nm", "must be non-zero");
  need(std::isfinite(d.intercept_ns), "detection.intercept_ns", "must be finite");
  need(d.jitter_ps >= 0.0 && std::isfinite(d.jitter_ps), "detection.jitter_ps", "must be >= 0");
  need(d.band_min_nm < d.band_max_nm, "detection.band_max_nm", "must exceed detection.band_min_nm");
  need(d.bin_width_ps >= 0.0 && std::isfinite(d.bin_width_ps), "detection.bin_width_ps", "must be >= 0");
  need(cfg.noise.background_per_bin >= 0.0 && std::isfinite(cfg.noise.background_per_bin), "noise.background_per_bin",
       "must be >= 0");
  need(cfg.noise.total_counts > 0.0 && std::isfinite(cfg.noise.total_counts), "noise.total_counts", "must be > 0");
  need(cfg.threads >= 0 && cfg.threads <= 1024, "threads", "must lie in [0, 1024]");
  for (const auto& o : cfg.outputs)
    need(std::find(info->products.begin(), info->products.end(), o) != info->products.end(), "outputs",
         "scenario " + info->name + " does not produce '" + o + "'");
  for (const auto& spec : info->params) {
    const auto it = cfg.params.find(spec.key);
    need(it != cfg.params.end() && !it->second.empty(), "params." + spec.key, "missing");
    need(spec.is_list || it->second.size() == 1, "params." + spec.key, "expected a single number");
    for (double v : it->second) need(std::isfinite(v), "params." + spec.key, "must be finite");
  }
  for (const auto& [k, v] : cfg.params) {
    const bool known = std::any_of(info->params.begin(), info->params.end(), [&](const ParamSpec& p) { return p.key == k; });
    need(known, "params." + k, "unknown key for scenario " + info->name);
  }
}

nlohmann::json to_json(const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["scenario"] = cfg.scenario;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["outputs"] = cfg.outputs;
  j["source"] = {{"model", model_name(cfg.source.model)},
                 {"signal_wavelength_nm", cfg.source.signal_wavelength_nm},
                 {"idler_wavelength_nm", cfg.source.idler_wavelength_nm},
                 {"single_photon_fwhm_ghz", cfg.source.single_photon_fwhm_ghz},
                 {"pump_fwhm_ghz", cfg.source.pump_fwhm_ghz},
                 {"pump_detuning_ghz", cfg.source.pump_detuning_ghz}};
  j["interferometer"] = {{"tau_H_ps", cfg.interferometer.tau_H_ps}, {"tau_F_ps", cfg.interferometer.tau_F_ps}};
  j["grid"] = {{"points", cfg.grid.points}, {"extent", cfg.grid.extent}};
  j["detection"] = {{"slope_ns_per_nm", cfg.detection.slope_ns_per_nm},
                    {"intercept_ns", cfg.detection.intercept_ns},
                    {"jitter_ps", cfg.detection.jitter_ps},
                    {"band_min_nm", cfg.detection.band_min_nm},
                    {"band_max_nm", cfg.detection.band_max_nm},
                    {"bin_width_ps", cfg.detection.bin_width_ps}};
  j["noise"] = {{"background_per_bin", cfg.noise.background_per_bin}, {"total_counts", cfg.noise.total_counts}};
  j["params"] = cfg.params;
  return j;
}

std::string to_toml(const ScenarioConfig& cfg) {
  std::ostringstream os;
  auto num = [](double v) {
    std::string s = format_number(v);
    // Keep floats recognisable as floats.
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
  };
  os << "scenario = \"" << cfg.scenario << "\"\n";
  os << "seed = " << cfg.seed << "\n";
  os << "threads = " << cfg.threads << "\n";
  if (!cfg.outputs.empty()) {
    os << "outputs = [";
    for (std::size_t k = 0; k < cfg.outputs.size(); ++k) os << (k ? ", " : "") << '"' << cfg.outputs[k] << '"';
    os << "]\n";
  }
  os << "\n[source]\nmodel = \"" << model_name(cfg.source.model) << "\"\n"
     << "signal_wavelength_nm = " << num(cfg.source.signal_wavelength_nm) << "\n"
     << "idler_wavelength_nm = " << num(cfg.source.idler_wavelength_nm) << "\n"
     << "single_photon_fwhm_ghz = " << num(cfg.source.single_photon_fwhm_ghz) << "\n"
     << "pump_fwhm_ghz = " << num(cfg.source.pump_fwhm_ghz) << "\n"
     << "pump_detuning_ghz = " << num(cfg.source.pump_detuning_ghz) << "\n";
  os << "\n[interferometer]\ntau_H_ps = " << num(cfg.interferometer.tau_H_ps) << "\n"
     << "tau_F_ps = " << num(cfg.interferometer.tau_F_ps) << "\n";
  os << "\n[grid]\npoints = " << cfg.grid.points << "\nextent = " << num(cfg.grid.extent) << "\n";
  os << "\n[detection]\nslope_ns_per_nm = " << num(cfg.detection.slope_ns_per_nm) << "\n"
     << "intercept_ns = " << num(cfg.detection.intercept_ns) << "\n"
     << "jitter_ps = " << num(cfg.detection.jitter_ps) << "\n"
     << "band_min_nm = " << num(cfg.detection.band_min_nm) << "\n"
     << "band_max_nm = " << num(cfg.detection.band_max_nm) << "\n"
     << "bin_width_ps = " << num(cfg.detection.bin_width_ps) << "\n";
  os << "\n[noise]\nbackground_per_bin = " << num(cfg.noise.background_per_bin) << "\n"
     << "total_counts = " << num(cfg.noise.total_counts) << "\n";
  if (!cfg.params.empty()) {
    os << "\n[params]\n";
    for (const auto& [k, v] : cfg.params) {
      const ScenarioInfo* info = find_scenario(cfg.scenario);
      bool is_list = false;
      if (info)
        for (const auto& p : info->params)
          if (p.key == k) is_list = p.is_list;
      os << k << " = ";
      if (is_list) {
        os << "[";
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << num(v[i]);
        os << "]\n";
      } else {
        os << num(v.front()) << "\n";
      }
    }
  }
  return os.str();
}

}  // namespace hfeq::scenarios
