// Acceptance run: one PASS/FAIL line per criterion. Tolerances and runtime
// budgets are pinned below; nothing here reads them from the environment.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hfeq/detection.hpp"
#include "hfeq/errors.hpp"
#include "hfeq/fits.hpp"
#include "hfeq/interferometer.hpp"
#include "hfeq/jsa.hpp"
#include "hfeq/metrics.hpp"
#include "hfeq/parallel.hpp"
#include "hfeq/scenarios/catalog.hpp"
#include "hfeq/units.hpp"
#include "oracles.hpp"

using namespace hfeq;
namespace fs = std::filesystem;

namespace {

const double kDs = units::ghz_to_angular(300.0);
const double kW1550 = units::wavelength_nm_to_angular(1550.0);

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

SpdcParams degenerate(double pump_ratio) {
  SpdcParams p;
  p.omega_s0 = p.omega_i0 = kW1550;
  p.single_photon_fwhm = kDs;
  p.pump_fwhm = pump_ratio * kDs;
  return p;
}

Spectrum1D comb_marginal(const SpdcParams& p, const FrequencyGrid& g, double tau_h) {
  InterferometerConfig c;
  c.tau_H = tau_h;
  return single_mode_spectrum(intensity(tpes_jsa(make_jsa(p, g, g), c)));
}

fs::path scratch_root() {
  static const fs::path root = fs::temp_directory_path() / ("hfeq_acceptance_" + std::to_string(std::random_device{}()));
  return root;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

scenarios::RunResult run(const std::string& name, const std::function<void(scenarios::ScenarioConfig&)>& edit,
                         const std::string& dir) {
  auto cfg = scenarios::default_config(name);
  if (edit) edit(cfg);
  return scenarios::run_scenario(cfg, scratch_root() / dir);
}

// Mode spacing 1/(2τ_H) from the analytic identity and from the bin lattice
// fitted to a simulated comb.
Outcome ac1() {
  const double taus[] = {6.14e-12, 8.27e-12, 13.8e-12, 16.5e-12};
  const double expected_ghz[] = {81.43, 60.4, 36.2, 30.3};
  const auto p = degenerate(1.0 / 20.0);
  const auto g = default_grid(p, {512, 0.0});
  Outcome o{true, ""};
  for (int k = 0; k < 4; ++k) {
    const double analytic = 1.0 / (2.0 * taus[k]) * 1e-9;
    const auto bins = estimate_dimension(comb_marginal(p, g, taus[k]), taus[k]);
    const double lattice = units::angular_to_ghz(bins.bin_centers[1] - bins.bin_centers[0]);
    const bool ok = std::abs(analytic / expected_ghz[k] - 1.0) <= 0.005 && std::abs(lattice / expected_ghz[k] - 1.0) <= 0.005;
    o.pass = o.pass && ok;
    o.detail += fmt("%.2f", analytic) + (k < 3 ? "/" : "");
  }
  o.detail += " GHz";
  return o;
}

// D = 5 and 7 at τ_H = 12/Δω_S and 20/Δω_S, Δω_p = Δω_S/20, 1024² grid.
Outcome ac2() {
  const auto p = degenerate(1.0 / 20.0);
  const auto g = default_grid(p, {1024, 0.0});
  const int d12 = estimate_dimension(comb_marginal(p, g, 12.0 / kDs), 12.0 / kDs).dimension;
  const int d20 = estimate_dimension(comb_marginal(p, g, 20.0 / kDs), 20.0 / kDs).dimension;
  return {d12 == 5 && d20 == 7, "D = " + std::to_string(d12) + ", " + std::to_string(d20)};
}

// Satellite null for a symmetric JSA at τ_H = 0.
Outcome ac3() {
  const auto p = degenerate(1.0 / 20.0);
  const auto g = default_grid(p, {512, 0.0});
  const auto f = make_jsa(p, g, g);
  const auto sat = satellite_jsi(f, 0.0);
  const auto in = intensity(f);
  const double ratio = *std::max_element(sat.values().begin(), sat.values().end()) /
                       *std::max_element(in.values().begin(), in.values().end());
  return {ratio <= 1e-20, "peak ratio " + fmt("%.3g", ratio)};
}

// General and closed-form TPES paths on symmetric inputs, 5 random delays.
Outcome ac4() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> th(-20.0, 20.0), tf(0.0, 40.0), ratio(0.05, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const auto p = degenerate(ratio(rng));
    const auto g = default_grid(p, {512, 0.0});
    const auto f = make_jsa(p, g, g);
    InterferometerConfig c;
    c.tau_H = th(rng) / kDs;
    c.tau_F = tf(rng) / kDs;
    const auto a = tpes_jsa(f, c);
    const auto b = tpes_jsa_degenerate(f, c);
    double peak = 0.0;
    for (const auto& v : f.values()) peak = std::max(peak, std::abs(v));
    for (std::size_t n = 0; n < a.values().size(); ++n) {
      const double d = std::abs(a.values()[n] - b.values()[n]);
      worst = std::max({worst, d, d / peak});
    }
  }
  return {worst <= 1e-10, "max deviation " + fmt("%.2g", worst) + " (absolute and peak-relative)"};
}

// Grid SVD against the double-Gaussian closed form, 1024² grid.
Outcome ac5() {
  Outcome o{true, "K ="};
  for (double r : {1.0, 0.5, 0.2, 0.05}) {
    const auto p = degenerate(r);
    const auto g = default_grid(p, {1024, 0.0});
    const double k = schmidt_number(make_jsa(p, g, g)).schmidt_number;
    const double ref = oracle::double_gaussian_k(p.pump_fwhm, p.single_photon_fwhm);
    o.pass = o.pass && std::abs(k / ref - 1.0) <= 0.01;
    o.detail += " " + fmt("%.4f", k) + "(" + fmt("%.4f", ref) + ")";
  }
  return o;
}

// K_F of the τ_H = 16/Δω_S comb at Δω_p = Δω_S/100 against 9 and against D.
Outcome ac6() {
  const auto p = degenerate(0.01);
  const auto g = make_grid(kW1550, 3.0 * kDs, 1024);
  InterferometerConfig c;
  c.tau_H = 16.0 / kDs;
  const auto hom = tpes_jsa(make_jsa(p, g, g), c);
  const double kf = schmidt_number(hom).schmidt_number;
  const int d = estimate_dimension(single_mode_spectrum(intensity(hom)), c.tau_H).dimension;
  return {kf > 9.0 && kf > d, "K_F = " + fmt("%.3f", kf) + ", D = " + std::to_string(d)};
}

// Jitter-limited visibility curve through the fig5 scenario.
Outcome ac7() {
  const auto r = run("fig5", [](auto& cfg) { cfg.params["blur_ghz"] = {4.0}; }, "ac7");
  const double dev = r.report.at("results").at("max_abs_deviation");
  const double v = r.report.at("results").at("probe_visibility");
  return {dev <= 0.01 && std::abs(v - 0.94) <= 0.01,
          "max |V - closed form| = " + fmt("%.4f", dev) + ", V_H(16.5 ps) = " + fmt("%.4f", v)};
}

// Franson fringe visibility at τ_F = 20/Δω_S through the fig4 scenario.
Outcome ac8() {
  const auto r = run("fig4", [](auto& cfg) { cfg.outputs = {"fringe", "fit"}; }, "ac8");
  double narrow = NAN, broad = NAN;
  for (const auto& f : r.report.at("results").at("fringes")) {
    if (f.at("pump_ratio") == 0.05) narrow = f.at("visibility");
    if (f.at("pump_ratio") == 1.0) broad = f.at("visibility");
  }
  return {narrow >= 0.98 && broad <= 0.2,
          "V(dw_S/20) = " + fmt("%.4f", narrow) + " (needs >= 0.98), V(dw_S) = " + fmt("%.3g", broad) + " (needs <= 0.2)"};
}

// Per-bin Schmidt numbers and fringe phases of the D = 5 comb.
Outcome ac9() {
  const auto r = run("appendixH", nullptr, "ac9");
  const auto& res = r.report.at("results");
  double kmin = INFINITY;
  for (const auto& b : res.at("bins")) kmin = std::min(kmin, b.at("schmidt_number").get<double>());
  const int d = res.at("dimension");
  const double spread = res.at("max_phase_difference_rad");
  return {d == 5 && kmin > 1.5 && spread <= 0.05,
          "D = " + std::to_string(d) + ", min K = " + fmt("%.3f", kmin) + ", phase spread " + fmt("%.4f", spread) + " rad"};
}

// Comb-fit coverage at 1e7 counts and background-subtracted fringe visibility.
Outcome ac10() {
  TofsCalibration cal;
  cal.jitter_fwhm = 0.0;
  const CombParams truth{1.0, 0.95, 8.27e-12, kDs, kW1550};
  const auto spec = comb_spectrum(make_grid(kW1550, 3.0 * kDs, 8192), truth);
  const auto e = expected_counts(spec, cal, {0.0, 1e7, 0});
  std::map<std::string, int> covered{{"V_H", 0}, {"tau_H", 0}, {"delta_omega_S", 0}};
  const std::map<std::string, double> want{{"V_H", truth.visibility}, {"tau_H", truth.tau_H}, {"delta_omega_S", truth.delta_omega_S}};
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const auto fit = fit_comb(to_frequency(poisson_sample(e, 70000 + s), cal));
    for (auto& [name, n] : covered) {
      const auto& q = fit.get(name);
      if (fit.converged && std::abs(q.value - want.at(name)) <= 3.0 * q.std_error) ++n;
    }
  }

  // C = B + A(1 + V cos φ) with raw visibility AV/(A + B) = 0.902.
  const double v = 0.985, a = 1e4, b = a * (v / 0.902 - 1.0);
  CountHistogram h;
  h.unit = EdgeUnit::radians;
  const int n = 64;
  for (int k = 0; k <= n; ++k) h.bin_edges.push_back(4.0 * units::pi * k / n);
  for (int k = 0; k < n; ++k) {
    const double x = 0.5 * (h.bin_edges[k] + h.bin_edges[k + 1]);
    h.counts.push_back(std::llround(b + a * (1.0 + v * std::cos(x))));
  }
  const double raw = fit_fringe(h).value("V");
  const double restored = fit_fringe(subtract_background(h, b)).value("V");

  bool ok = restored >= 0.98;
  std::string detail = "coverage";
  for (const auto& [name, c] : covered) {
    ok = ok && c >= 95;
    detail += " " + name + " " + std::to_string(c) + "/" + std::to_string(seeds);
  }
  return {ok, detail + "; fringe V " + fmt("%.3f", raw) + " -> " + fmt("%.4f", restored)};
}

// ToFS resolution chain at the default calibration.
Outcome ac11() {
  const TofsCalibration cal;
  const double pm = tofs_wavelength_resolution(cal) * 1e3;
  const double ghz = units::angular_to_ghz(tofs_frequency_resolution(cal, 1550.0));
  return {std::abs(pm - 31.0) <= 0.5 && std::abs(ghz - 3.87) <= 0.1,
          fmt("%.2f", pm) + " pm, " + fmt("%.3f", ghz) + " GHz"};
}

std::map<std::string, std::string> data_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name != "manifest.json" && name != "config.toml") out[name] = slurp(e.path());
  }
  return out;
}

// Every scenario twice with the same seed; histogram synthesis at 1 and 8 threads.
Outcome ac12() {
  int identical = 0, total = 0;
  for (const auto& s : scenarios::catalog()) {
    const auto a = run(s.name, [](auto& cfg) { cfg.seed = 12; }, "ac12/" + s.name + "_a");
    const auto b = run(s.name, [](auto& cfg) { cfg.seed = 12; }, "ac12/" + s.name + "_b");
    ++total;
    if (data_files(a.manifest.parent_path()) == data_files(b.manifest.parent_path())) ++identical;
  }

  TofsCalibration cal;
  const auto spec = comb_spectrum(make_grid(kW1550, 3.0 * kDs, 4096), {1.0, 0.9, 13.8e-12, kDs, kW1550});
  const NoiseModel noise{5.0, 1e6, 99};
  const unsigned saved = parallel::thread_count();
  parallel::set_thread_count(1);
  const auto h1 = synthesize_counts(spec, cal, noise);
  parallel::set_thread_count(8);
  const auto h8 = synthesize_counts(spec, cal, noise);
  parallel::set_thread_count(saved);
  const bool threads_ok = h1.counts == h8.counts && h1.bin_edges == h8.bin_edges;
  return {identical == total && threads_ok, std::to_string(identical) + "/" + std::to_string(total) +
                                                " scenarios byte-identical; histogram 1 vs 8 threads " +
                                                (threads_ok ? "identical" : "DIFFERENT")};
}

struct Criterion {
  const char* id;
  const char* name;
  double budget_s;
  Outcome (*fn)();
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"AC1", "mode-spacing identity", 1.0, ac1},
      {"AC2", "dimension reproduction", 10.0, ac2},
      {"AC3", "destructive-satellite null", 5.0, ac3},
      {"AC4", "degenerate-form equivalence", 30.0, ac4},
      {"AC5", "Schmidt oracle", 60.0, ac5},
      {"AC6", "K_F exceeds D", 60.0, ac6},
      {"AC7", "jitter-visibility curve", 60.0, ac7},
      {"AC8", "Franson contrast vs correlation", 60.0, ac8},
      {"AC9", "per-bin properties", 120.0, ac9},
      {"AC10", "pipeline round-trips", 300.0, ac10},
      {"AC11", "ToFS resolution chain", 1.0, ac11},
      {"AC12", "determinism", 120.0, ac12},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s %-5s %-32s %s [%.2f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::error_code ec;
  fs::remove_all(scratch_root(), ec);
  std::printf("%d of 12 criteria passed\n", 12 - failed);
  return failed == 0 ? 0 : 1;
}
