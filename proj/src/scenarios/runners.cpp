#include "runners.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "hfeq/detection.hpp"
#include "hfeq/errors.hpp"
#include "hfeq/fits.hpp"
#include "hfeq/interferometer.hpp"
#include "hfeq/jsa.hpp"
#include "hfeq/metrics.hpp"
#include "hfeq/scenarios/svg.hpp"
#include "hfeq/units.hpp"

namespace hfeq::scenarios::runners {

namespace {

using nlohmann::json;
using units::pi;

double bandwidth(const ScenarioConfig& c) { return units::ghz_to_angular(c.source.single_photon_fwhm_ghz); }

std::string tag(double v) {
  std::string s = format_number(v);
  std::replace(s.begin(), s.end(), '.', 'p');
  std::replace(s.begin(), s.end(), '-', 'm');
  return s;
}

void emit_field(OutputSink& sink, const ScenarioConfig& cfg, const std::string& name, const RealField2D& f,
                const std::string& title) {
  if (!cfg.wants("jsi")) return;
  sink.text(name + ".csv", "jsi", title, field_csv(f));
  sink.text(name + ".svg", "plot", title, svg::heatmap(f, title));
}

svg::Series spectrum_series(const Spectrum1D& s, const std::string& label, double norm = 0.0) {
  svg::Series out;
  out.label = label;
  double peak = norm;
  if (peak <= 0.0)
    for (double v : s.values()) peak = std::max(peak, v);
  const auto& g = s.grid();
  for (std::size_t k = 0; k < s.size(); ++k) {
    out.x.push_back(units::angular_to_ghz(g.at(k) - g.center()));
    out.y.push_back(peak > 0.0 ? s[k] / peak : 0.0);
  }
  return out;
}

int count_peaks(const Spectrum1D& s, double rel) {
  double peak = 0.0;
  for (double v : s.values()) peak = std::max(peak, v);
  int n = 0;
  for (std::size_t k = 1; k + 1 < s.size(); ++k)
    if (s[k] > s[k - 1] && s[k] >= s[k + 1] && s[k] >= rel * peak) ++n;
  return n;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = n == 1 ? a : a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  return v;
}

std::size_t count_param(const ScenarioConfig& cfg, const std::string& key, std::size_t lo) {
  const double v = cfg.param(key);
  if (!(v >= static_cast<double>(lo)) || v != std::floor(v) || v > 1e6)
    throw ConfigError("params." + key + ": expected an integer >= " + std::to_string(lo));
  return static_cast<std::size_t>(v);
}

double wrap(double phase) { return std::remainder(phase, 2.0 * pi); }

}  // namespace

// HOM combs at several delays, with peak-counted and bin-weight dimensions.
void fig2(const ScenarioConfig& cfg, OutputSink& sink, Report& rep) {
  const SpdcParams p = cfg.source.params();
  const double ds = bandwidth(cfg);
  const auto grid = default_grid(p, cfg.grid.spec());
  const auto f = make_jsa(p, grid, grid);
  DimensionOptions dopt;
  dopt.threshold = cfg.param("threshold");

  svg::LinePlot plot{"Single-mode spectra", "signal detuning (GHz)", "normalized counts", {}};
  std::vector<double> taus, dims, peaks;
  json cases = json::array();
  for (double t : cfg.list("tau_H_times_bandwidth")) {
    InterferometerConfig ic;
    ic.tau_H = t / ds;
    const auto jsa = tpes_jsa(f, ic);
    const auto jsi = intensity(jsa);
    const auto marginal = single_mode_spectrum(jsi);
    const std::string name = "tpes_tauH_" + tag(t);
    emit_field(sink, cfg, name + "_jsi", jsi, "TPES JSI, tau_H = " + format_number(t) + "/dw_S");
    if (cfg.wants("spectrum"))
      sink.text(name + "_spectrum.csv", "spectrum", "single-mode spectrum, tau_H = " + format_number(t) + "/dw_S",
                spectrum_csv(marginal, "counts"));
    plot.series.push_back(spectrum_series(marginal, "tau_H = " + format_number(t) + "/dw_S"));

    const int n_peaks = count_peaks(marginal, dopt.threshold);
    int d = n_peaks;
    json entry = {{"tau_H_times_bandwidth", t}, {"tau_H_ps", ic.tau_H / units::ps}, {"peak_count", n_peaks}};
    if (t != 0.0) {
      const auto bins = estimate_dimension(marginal, std::abs(ic.tau_H), dopt);
      d = bins.dimension;
      entry["bins"] = to_json(bins);
    }
    entry["dimension"] = d;
    cases.push_back(entry);
    taus.push_back(t);
    dims.push_back(d);
    peaks.push_back(n_peaks);
    rep.check("dimension equals peak count at tau_H = " + format_number(t) + "/dw_S", d, n_peaks, n_peaks);
  }
  if (cfg.wants("spectrum")) {
    sink.text("spectra.svg", "plot", "single-mode spectra", svg::line_plot(plot));
    sink.text("dimensions.csv", "curve", "dimension per delay",
              table_csv({"tau_H_times_bandwidth", "dimension", "peak_count"}, {taus, dims, peaks}));
  }
  rep.results["cases"] = cases;
  rep.results["pump_ratio"] = p.pump_fwhm / ds;
}

// HOM visibility against frequency correlation (Schmidt number) over a pump ladder.
void fig3(const ScenarioConfig& cfg, OutputSink& sink, Report& rep) {
  SpdcParams p = cfg.source.params();
  const double ds = bandwidth(cfg);
  InterferometerConfig ic;
  ic.tau_H = cfg.param("tau_H_times_bandwidth") / ds;

  std::vector<double> ratios = cfg.list("pump_ratios");
  std::sort(ratios.begin(), ratios.end(), std::greater<>());
  std::vector<double> vis, kf, dims;
  for (double r : ratios) {
    if (!(r > 0.0)) throw ConfigError("params.pump_ratios: ratios must be > 0");
    p.pump_fwhm = r * ds;
    const auto grid = default_grid(p, {cfg.grid.points, cfg.param("extent_over_bandwidth") * ds / std::max(ds, p.pump_fwhm)});
    const auto f = make_jsa(p, grid, grid);
    const auto hom = tpes_jsa(f, ic);
    const auto spec = single_mode_spectrum(intensity(hom));
    const auto ref = single_mode_spectrum(intensity(f));
    vis.push_back(hom_visibility(spec, ref));
    kf.push_back(schmidt_number(hom).schmidt_number);
    dims.push_back(estimate_dimension(spec, ic.tau_H).dimension);
    if (cfg.wants("jsi") && (r == ratios.front() || r == ratios.back()))
      emit_field(sink, cfg, "tpes_pump_ratio_" + tag(r), intensity(hom),
                 "TPES JSI, dw_p/dw_S = " + format_number(r));
  }
  if (cfg.wants("curve")) {
    sink.text("visibility_vs_schmidt.csv", "curve", "HOM visibility, Schmidt number and dimension per pump ratio",
              table_csv({"pump_ratio", "hom_visibility", "schmidt_number", "dimension"}, {ratios, vis, kf, dims}));
    sink.text("schmidt_vs_ratio.svg", "plot", "Schmidt number and dimension against pump ratio",
              svg::line_plot({"K_F and D against dw_p/dw_S", "dw_p/dw_S", "value",
                              {{"K_F", ratios, kf, true}, {"D", ratios, dims, true}}}));
    sink.text("visibility_vs_ratio.svg", "plot", "HOM visibility against pump ratio",
              svg::line_plot({"V_H against dw_p/dw_S", "dw_p/dw_S", "V_H", {{"V_H", ratios, vis, true}}}));
  }
  bool k_monotone = true, v_monotone = true;
  for (std::size_t k = 1; k < ratios.size(); ++k) {
    k_monotone = k_monotone && kf[k] >= kf[k - 1] * (1.0 - 1e-9);
    v_monotone = v_monotone && vis[k] >= vis[k - 1] - 1e-9;
  }
  rep.check("Schmidt number grows as the pump narrows", k_monotone ? 1 : 0, 1, 1);
  rep.check("HOM visibility grows as the pump narrows", v_monotone ? 1 : 0, 1, 1);
  rep.check("K_F exceeds D for the narrowest pump", kf.back() - dims.back(), 0.0, INFINITY);
  rep.results["pump_ratios"] = ratios;
  rep.results["hom_visibility"] = vis;
  rep.results["schmidt_number"] = kf;
  rep.results["dimension"] = dims;
}

// JSIs under HOM, Franson and both, and Franson fringes for two pump bandwidths.
void fig4(const ScenarioConfig& cfg, OutputSink& sink, Report& rep) {
  SpdcParams p = cfg.source.params();
  const double ds = bandwidth(cfg);
  const double tau_h = cfg.param("tau_H_times_bandwidth") / ds;
  const double tau_f = cfg.param("tau_F_times_bandwidth") / ds;

  {
    const auto grid = default_grid(p, cfg.grid.spec());
    const auto f = make_jsa(p, grid, grid);
    InterferometerConfig hom, fr, both;
    hom.tau_H = tau_h;
    fr.tau_F = tau_f;
    both.tau_H = tau_h;
    both.tau_F = tau_f;
    emit_field(sink, cfg, "jsi_hom", intensity(tpes_jsa(f, hom)), "TPES JSI under HOM interference");
    emit_field(sink, cfg, "jsi_franson", intensity(tpes_jsa(f, fr)), "TPES JSI under Franson interference");
    emit_field(sink, cfg, "jsi_hom_franson", intensity(tpes_jsa(f, both)), "TPES JSI under HOM and Franson interference");
  }

  const std::size_t points = count_param(cfg, "scan_points", 5);
  const double periods = cfg.param("scan_periods");
  svg::LinePlot plot{"Franson fringes", "tau_F offset (fs)", "coincidence probability", {}};
  json fringes = json::array();
  std::vector<double> vis;
  for (double r : cfg.list("pump_ratios")) {
    p.pump_fwhm = r * ds;
    const double period = 2.0 * pi / p.pump();
    const auto scan = linspace(tau_f - 0.5 * periods * period, tau_f + 0.5 * periods * period, points);
    InterferometerConfig ic;
    ic.tau_H = 0.0;
    ic.tau_F = tau_f;
    const auto fs = fringe_scan(p, ic, scan, cfg.grid.spec());
    FringeFitOptions fo;
    const auto fit = fit_fringe(fs, fo);
    vis.push_back(fit.value("V"));
    std::vector<double> offs_fs;
    for (double t : scan) offs_fs.push_back((t - tau_f) / units::fs);
    const std::string name = "fringe_pump_ratio_" + tag(r);
    if (cfg.wants("fringe"))
      sink.text(name + ".csv", "fringe", "Franson fringe, dw_p/dw_S = " + format_number(r),
                table_csv({"tau_F_offset_fs", "probability"}, {offs_fs, fs.probabilities}));
    if (cfg.wants("fit")) sink.json(name + "_fit.json", "fit", "fringe fit, dw_p/dw_S = " + format_number(r), to_json(fit));
    plot.series.push_back({"dw_p/dw_S = " + format_number(r), offs_fs, fs.probabilities, false});
    fringes.push_back({{"pump_ratio", r},
                       {"visibility", fit.value("V")},
                       {"closed_form_visibility", std::exp(-p.pump_fwhm * p.pump_fwhm * tau_f * tau_f / (16.0 * units::ln2))},
                       {"exceeds_classical_bound", fit.flags.at("exceeds_classical_bound")}});
  }
  if (cfg.wants("fringe")) sink.text("fringes.svg", "plot", "Franson fringes", svg::line_plot(plot));
  rep.results["fringes"] = fringes;
  rep.results["tau_F_ps"] = tau_f / units::ps;
  const auto& ratios = cfg.list("pump_ratios");
  const auto narrow = std::min_element(ratios.begin(), ratios.end()) - ratios.begin();
  const auto broad = std::max_element(ratios.begin(), ratios.end()) - ratios.begin();
  rep.check("narrowest pump minus broadest pump fringe visibility", vis[narrow] - vis[broad], 0.0, INFINITY);
}

// HOM visibility under detector jitter against τ_H, with the closed-form attenuation.
void fig5(const ScenarioConfig& cfg, OutputSink& sink, Report& rep) {
  SpdcParams p = cfg.source.params();
  const double ds = bandwidth(cfg);
  p.pump_fwhm = cfg.param("pump_ratio") * ds;
  const double blur = units::ghz_to_angular(cfg.param("blur_ghz"));
  const double half = cfg.param("extent_over_bandwidth") * ds;
  const auto grid = make_grid(0.5 * (p.omega_s0 + p.omega_i0), 2.0 * half, cfg.grid.points);
  const auto f = make_jsa(p, grid, grid);
  const auto ref = convolve_gaussian(single_mode_spectrum(intensity(f)), blur);

  const auto& range = cfg.list("tau_H_ps_range");
  if (range.size() != 2 || !(range[1] > range[0]) || !(range[0] > 0.0))
    throw ConfigError("params.tau_H_ps_range: expected [min, max] with 0 < min < max");
  auto taus = linspace(range[0], range[1], count_param(cfg, "points", 2));
  const double probe = cfg.param("probe_tau_H_ps");
  std::vector<double> sim, analytic;
  auto visibility = [&](double tau_ps) {
    InterferometerConfig ic;
    ic.tau_H = tau_ps * units::ps;
    return hom_visibility(convolve_gaussian(single_mode_spectrum(intensity(tpes_jsa(f, ic))), blur), ref);
  };
  auto attenuation = [&](double tau_ps) {
    const double t = tau_ps * units::ps;
    return std::exp(-blur * blur * t * t / (4.0 * units::ln2));
  };
  double worst = 0.0;
  for (double t : taus) {
    sim.push_back(visibility(t));
    analytic.push_back(attenuation(t));
    worst = std::max(worst, std::abs(sim.back() - analytic.back()));
  }
  const double v_probe = visibility(probe);
  if (cfg.wants("curve")) {
    sink.text("visibility_vs_tauH.csv", "curve", "jitter-limited HOM visibility",
              table_csv({"tau_H_ps", "simulated_visibility", "closed_form_visibility"}, {taus, sim, analytic}));
    sink.text("visibility_vs_tauH.svg", "plot", "jitter-limited HOM visibility",
              svg::line_plot({"V_H under " + format_number(cfg.param("blur_ghz")) + " GHz blur", "tau_H (ps)", "V_H",
                              {{"simulated", taus, sim, true}, {"closed form", taus, analytic, false}}}));
  }
  rep.results["probe_tau_H_ps"] = probe;
  rep.results["probe_visibility"] = v_probe;
  rep.results["max_abs_deviation"] = worst;
  rep.check("simulated curve follows the closed-form attenuation", worst, 0.0, 0.01);
}

// Satellite JSIs: the degenerate null at τ_H = 0, the comb at τ_H ≠ 0, the non-degenerate case.
void appendix_a(const ScenarioConfig& cfg, OutputSink& sink, Report& rep) {
  SpdcParams p = cfg.source.params();
  const double ds = bandwidth(cfg);
  p.omega_i0 = p.omega_s0;
  p.pump_center.reset();
  const auto grid = default_grid(p, cfg.grid.spec());
  const auto f = make_jsa(p, grid, grid);
  const auto jsi = intensity(f);
  double in_peak = 0.0;
  for (double v : jsi.values()) in_peak = std::max(in_peak, v);

  json cases = json::array();
  for (double t : cfg.list("tau_H_times_bandwidth")) {
    const auto sat = satellite_jsi(f, t / ds);
    double peak = 0.0, dev = 0.0;
    for (std::size_t s = 0; s < sat.n_s(); ++s)
      for (std::size_t i = 0; i < sat.n_i(); ++i) {
        peak = std::max(peak, sat(s, i));
        const double wm = grid.at(s) - grid.at(i);
        dev = std::max(dev, std::abs(sat(s, i) - jsi(s, i) * (1.0 - std::cos(wm * t / ds)) / 8.0));
      }
    emit_field(sink, cfg, "satellite_degenerate_tauH_" + tag(t), sat,
               "satellite JSI, degenerate, tau_H = " + format_number(t) + "/dw_S");
    cases.push_back({{"tau_H_times_bandwidth", t}, {"peak_ratio", peak / in_peak}, {"closed_form_max_deviation", dev / in_peak}});
    if (t == 0.0) rep.check("satellite null at tau_H = 0 (peak ratio)", peak / in_peak, 0.0, 1e-20);
    rep.check("degenerate satellite matches |f|^2 (1 - cos)/8 at tau_H = " + format_number(t) + "/dw_S", dev / in_peak,
              0.0, 1e-12);
  }

  // Non-degenerate pair: the exchanged amplitude no longer overlaps.
  SpdcParams q = cfg.source.params();
  q.omega_i0 = q.omega_s0 - cfg.param("nondegenerate_offset_times_bandwidth") * ds;
  q.pump_center.reset();
  const auto gq = default_grid(q, cfg.grid.spec());
  const auto fq = make_jsa(q, gq, gq);
  const double t = cfg.param("nondegenerate_tau_H_times_bandwidth");
  const auto satq = satellite_jsi(fq, t / ds);
  const double ratio = integrate_2d(satq) / integrate_2d(intensity(fq));
  emit_field(sink, cfg, "satellite_nondegenerate", satq, "satellite JSI, non-degenerate pair");
  cases.push_back({{"nondegenerate_offset_times_bandwidth", cfg.param("nondegenerate_offset_times_bandwidth")},
                   {"tau_H_times_bandwidth", t},
                   {"satellite_to_input_mass", ratio}});
  rep.check("non-degenerate satellites keep ~1/8 of the input mass", ratio, 0.9 / 8.0, 1.1 / 8.0);
  rep.results["cases"] = cases;
}

// Grid-like JSI at τ_F = τ_H with Δω_p = Δω_S, and its lattice of maxima.
void appendix_b(const ScenarioConfig& cfg, OutputSink& sink, Report& rep) {
  SpdcParams p = cfg.source.params();
  const double ds = bandwidth(cfg);
  p.pump_fwhm = cfg.param("pump_ratio") * ds;
  const double tau = cfg.param("tau_times_bandwidth") / ds;
  const auto grid = default_grid(p, cfg.grid.spec());
  const auto f = make_jsa(p, grid, grid);
  InterferometerConfig ic;
  ic.tau_H = ic.tau_F = tau;
  const auto jsi = intensity(tpes_jsa(f, ic));
  emit_field(sink, cfg, "grid_state_jsi", jsi, "grid-state JSI at tau_F = tau_H");

  // Separable analytic intensity: exp(-4ln2 x²/Δ²)·cos²(τ x/2 + φ) along each
  // principal axis; φ is zero for ω₋ and ω_p τ/2 for ω₊ (absolute Franson phase).
  const double cm = p.omega_s0 - p.omega_i0;  // ω₋ at the grid centres
  auto stationary = [&](double x, double width, double phase) {
    const double a = 4.0 * units::ln2 / (width * width);
    for (int it = 0; it < 50; ++it) {
      const double u = 0.5 * tau * x + phase;
      const double g1 = -2.0 * a * x - tau * std::tan(u);
      const double g2 = -2.0 * a - 0.5 * tau * tau / (std::cos(u) * std::cos(u));
      const double step = g1 / g2;
      x -= step;
      if (std::abs(step) < 1e-12 * ds) break;
    }
    return x;
  };
  const double phase_p = std::fmod(0.5 * p.pump() * tau, pi);
  double peak = 0.0;
  for (double v : jsi.values()) peak = std::max(peak, v);
  const double h = grid.spacing();
  const double rel = cfg.param("maxima_threshold");
  json maxima = json::array();
  double worst = 0.0;
  for (std::size_t s = 1; s + 1 < jsi.n_s(); ++s)
    for (std::size_t i = 1; i + 1 < jsi.n_i(); ++i) {
      const double v = jsi(s, i);
      if (v < rel * peak) continue;
      bool local = true;
      for (int a = -1; a <= 1 && local; ++a)
        for (int b = -1; b <= 1; ++b)
          if ((a || b) && jsi(s + a, i + b) > v) {
            local = false;
            break;
          }
      if (!local) continue;
      const double wm = grid.at(s) - grid.at(i) - cm;
      const double wp = (grid.at(s) - grid.center()) + (grid.at(i) - grid.center()) + (p.omega_s0 + p.omega_i0 - p.pump());
      const double em = stationary(wm, p.single_photon_fwhm, 0.0);
      const double ep = stationary(wp, p.pump_fwhm, phase_p);
      // Grid offsets along the diagonals are sums of two axis offsets.
      const double dev = std::max(std::abs(wm - em), std::abs(wp - ep)) / h;
      worst = std::max(worst, dev);
      maxima.push_back({{"delta_s_ghz", units::angular_to_ghz(grid.at(s) - grid.center())},
                        {"delta_i_ghz", units::angular_to_ghz(grid.at(i) - grid.center())},
                        {"relative_height", v / peak},
                        {"offset_from_analytic_spacings", dev}});
    }
  rep.results["pitch_ghz"] = units::angular_to_ghz(2.0 * pi / tau);
  rep.results["maxima"] = maxima;
  rep.results["max_offset_spacings"] = worst;
  if (cfg.wants("jsi")) sink.json("lattice_maxima.json", "report", "local maxima of the grid-state JSI", maxima);
  rep.check("number of lattice maxima above threshold", static_cast<double>(maxima.size()), 5, INFINITY);
  rep.check("maxima sit on the analytic lattice (grid spacings)", worst, 0.0, 2.0);
}

// ToFS chain: resolution, calibration fit, comb histogram and its fit.
void appendix_c(const ScenarioConfig& cfg, OutputSink& sink, Report& rep) {
  const auto cal = cfg.detection.calibration();
  validate(cal);
  const double lambda_c = cfg.source.signal_wavelength_nm;
  const double res_pm = tofs_wavelength_resolution(cal) * 1e3;
  const double res_ghz = units::angular_to_ghz(tofs_frequency_resolution(cal, lambda_c));
  rep.results["wavelength_resolution_pm"] = res_pm;
  rep.results["frequency_resolution_ghz"] = res_ghz;

  // Synthetic calibration points along the dispersion line.
  const std::size_t n_cal = count_param(cfg, "calibration_points", 2);
  const double span = cfg.param("calibration_span_nm");
  const double noise_ns = cfg.param("timing_noise_ps") * 1e-3;
  CounterRng rng(cfg.seed, 0xCA11B);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::pair<double, double>> pts;
  std::vector<double> cl, ct;
  for (double l : linspace(lambda_c - 0.5 * span, lambda_c + 0.5 * span, n_cal)) {
    const double t = cal.slope * l + cal.intercept + noise_ns * gauss(rng);
    pts.emplace_back(l, t);
    cl.push_back(l);
    ct.push_back(t);
  }
  const auto cal_fit = fit_linear_calibration(pts);
  if (cfg.wants("fit")) {
    sink.json("calibration_fit.json", "fit", "linear ToFS calibration fit", to_json(cal_fit));
    sink.text("calibration_points.csv", "curve", "synthetic calibration points",
              table_csv({"wavelength_nm", "arrival_ns"}, {cl, ct}));
  }
  rep.results["calibration_slope_ns_per_nm"] = cal_fit.value("slope");
  rep.results["calibration_intercept_ns"] = cal_fit.value("intercept");

  // Comb spectrum through jitter, binning and Poisson sampling.
  const double ds = bandwidth(cfg);
  const double w0 = units::wavelength_nm_to_angular(lambda_c);
  const CombParams truth{1.0, cfg.param("comb_visibility"), cfg.param("comb_tau_H_ps") * units::ps, ds, w0};
  const auto spec = comb_spectrum(make_grid(w0, 3.0 * ds, cfg.grid.points), truth);
  const auto hist = synthesize_counts(spec, cal, cfg.noise_model(), cfg.detection.binning());
  const auto freq = to_frequency(hist, cal);
  if (cfg.wants("histogram")) {
    sink.text("histogram_time.csv", "histogram", "coincidence counts against arrival time", histogram_csv(hist));
    sink.text("histogram_frequency.csv", "histogram", "coincidence counts against angular frequency",
              histogram_csv(freq));
    std::vector<double> x, y;
    for (std::size_t k = 0; k < hist.counts.size(); ++k) {
      x.push_back(0.5 * (hist.bin_edges[k] + hist.bin_edges[k + 1]) / units::ns);
      y.push_back(static_cast<double>(hist.counts[k]));
    }
    sink.text("histogram_time.svg", "plot", "coincidence histogram",
              svg::line_plot({"ToFS coincidence histogram", "arrival time (ns)", "counts", {{"counts", x, y, false}}}));
  }
  double v_fit = NAN;
  if (cfg.noise.background_per_bin == 0.0) {
    const auto comb_fit = fit_comb(freq);
    v_fit = comb_fit.value("V_H");
    if (cfg.wants("fit")) sink.json("comb_fit.json", "fit", "comb fit of the frequency histogram", to_json(comb_fit));
    rep.results["fitted_visibility"] = v_fit;
    rep.results["fitted_mode_spacing_ghz"] = comb_fit.value("mode_spacing") * 1e-9;
  }
  const double blur = tofs_frequency_resolution(cal, lambda_c);
  const double expected_v = truth.visibility * std::exp(-blur * blur * truth.tau_H * truth.tau_H / (4.0 * units::ln2));
  rep.results["expected_visibility"] = expected_v;

  if (cal.jitter_fwhm == 49.1e-12 && cal.slope == -1.58597) {
    rep.check("wavelength resolution (pm)", res_pm, 30.5, 31.5);
    rep.check("frequency resolution at 1550 nm (GHz)", res_ghz, 3.77, 3.97);
  }
  rep.check("calibration slope within 0.002 ns/nm", std::abs(cal_fit.value("slope") - cal.slope), 0.0, 0.002);
  if (std::isfinite(v_fit)) rep.check("fitted comb visibility against the blurred truth", std::abs(v_fit - expected_v), 0.0, 0.02);
}

// Sinc JSA across degeneracy: the exchanged amplitude overlaps less as the
// centres separate, so the comb fades and the marginal splits into two lobes.
void appendix_f(const ScenarioConfig& cfg, OutputSink& sink, Report& rep) {
  SpdcParams base = cfg.source.params();
  base.model = JsaModel::sinc;
  const double ds = bandwidth(cfg);
  base.pump_fwhm = cfg.param("pump_ratio") * ds;
  base.pump_center.reset();
  InterferometerConfig ic;
  ic.tau_H = cfg.param("tau_H_times_bandwidth") / ds;

  std::vector<double> offsets = cfg.list("offsets_times_bandwidth"), vis, overlap, lobes;
  std::sort(offsets.begin(), offsets.end());
  svg::LinePlot plot{"Single-mode spectra across degeneracy", "signal detuning (GHz)", "normalized counts", {}};
  for (double o : offsets) {
    if (!(o >= 0.0)) throw ConfigError("params.offsets_times_bandwidth: offsets must be >= 0");
    SpdcParams p = base;
    p.omega_s0 = base.omega_s0 + 0.5 * o * ds;
    p.omega_i0 = base.omega_s0 - 0.5 * o * ds;
    const auto grid = default_grid(p, cfg.grid.spec());
    const auto f = make_jsa(p, grid, grid);
    const auto spec = single_mode_spectrum(intensity(tpes_jsa(f, ic)));

    // Incoherent mixture of the direct and exchanged amplitudes: the TPES
    // marginal without the interference term. The interference fraction is
    // the L1 share of the cross term in the marginal.
    RealField2D mix(grid, grid);
    std::complex<double> cross = 0.0;
    double norm = 0.0;
    for (std::size_t a = 0; a < f.n_s(); ++a)
      for (std::size_t b = 0; b < f.n_i(); ++b) {
        mix(a, b) = 0.25 * (std::norm(f(a, b)) + std::norm(f(b, a)));
        cross += std::conj(f(a, b)) * f(b, a);
        norm += std::norm(f(a, b));
      }
    const auto ref = single_mode_spectrum(mix);
    double diff = 0.0, total = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
      diff += std::abs(spec[k] - ref[k]);
      total += ref[k];
    }
    vis.push_back(diff / total);
    overlap.push_back(std::abs(cross) / norm);
    lobes.push_back(count_peaks(ref, 0.5));
    if (cfg.wants("spectrum"))
      sink.text("spectrum_offset_" + tag(o) + ".csv", "spectrum",
                "single-mode spectrum, signal-idler offset " + format_number(o) + " dw_S", spectrum_csv(spec, "counts"));
    plot.series.push_back(spectrum_series(spec, "offset " + format_number(o) + " dw_S"));
  }
  if (cfg.wants("spectrum")) sink.text("spectra.svg", "plot", "single-mode spectra", svg::line_plot(plot));
  if (cfg.wants("curve")) {
    sink.text("visibility_vs_offset.csv", "curve", "HOM comb contrast against non-degeneracy",
              table_csv({"offset_times_bandwidth", "interference_fraction", "exchange_overlap", "dominant_lobes"},
                        {offsets, vis, overlap, lobes}));
    sink.text("visibility_vs_offset.svg", "plot", "HOM comb contrast against non-degeneracy",
              svg::line_plot({"Comb contrast across degeneracy", "signal-idler offset (dw_S)", "value",
                              {{"interference fraction", offsets, vis, true}, {"exchange overlap", offsets, overlap, true}}}));
  }
  rep.results["offsets_times_bandwidth"] = offsets;
  rep.results["interference_fraction"] = vis;
  rep.results["exchange_overlap"] = overlap;
  rep.results["dominant_lobes"] = lobes;
  bool mono = true;
  for (std::size_t k = 1; k < vis.size(); ++k)
    mono = mono && vis[k] <= vis[k - 1] + 1e-6 && overlap[k] <= overlap[k - 1] + 1e-6;
  rep.check("interference fraction and exchange overlap fall as the pair leaves degeneracy", mono ? 1 : 0, 1, 1);
  rep.check("single dominant lobe at degeneracy", lobes.front(), 1, 1);
  rep.check("two dominant lobes at the largest offset", lobes.back(), 2, 2);
}

// Franson phase control by scanning the pump frequency.
void appendix_g(const ScenarioConfig& cfg, OutputSink& sink, Report& rep) {
  const SpdcParams p = cfg.source.params();
  InterferometerConfig ic = cfg.interferometer.config();
  ic.phase_mode = PhaseMode::pump_scan;
  if (!(ic.tau_F > 0.0)) throw ConfigError("interferometer.tau_F_ps: pump scans need tau_F > 0");
  const double period = 2.0 * pi / ic.tau_F;
  const double periods = cfg.param("scan_periods");
  const auto scan = linspace(-0.5 * periods * period, 0.5 * periods * period, count_param(cfg, "scan_points", 5));
  const auto fs = fringe_scan(p, ic, scan, cfg.grid.spec());
  const auto fit = fit_fringe(fs);
  std::vector<double> mhz;
  for (double d : scan) mhz.push_back(units::angular_to_mhz(d));
  if (cfg.wants("fringe")) {
    sink.text("pump_scan.csv", "fringe", "coincidence probability against pump detuning",
              table_csv({"pump_detuning_mhz", "probability"}, {mhz, fs.probabilities}));
    sink.text("pump_scan.svg", "plot", "pump-scan fringe",
              svg::line_plot({"Pump-frequency scan", "pump detuning (MHz)", "probability",
                              {{"", mhz, fs.probabilities, false}}}));
  }
  if (cfg.wants("fit")) sink.json("pump_scan_fit.json", "fit", "pump-scan fringe fit", to_json(fit));
  const double fitted_mhz = units::angular_to_mhz(fit.value("period"));
  const double expected_mhz = units::angular_to_mhz(period);
  rep.results["expected_period_mhz"] = expected_mhz;
  rep.results["fitted_period_mhz"] = fitted_mhz;
  rep.results["visibility"] = fit.value("V");
  // Two periods over a 149.8 MHz scan would need tau_F = 2/149.8 MHz.
  rep.results["tau_F_implied_by_149p8MHz_two_periods_ns"] = 2.0 / 149.8e6 / units::ns;
  rep.check("fitted pump period against 2pi/tau_F (relative)", std::abs(fitted_mhz / expected_mhz - 1.0), 0.0, 0.02);
}

// Per-bin Schmidt numbers and Franson fringe phases of the comb.
void appendix_h(const ScenarioConfig& cfg, OutputSink& sink, Report& rep) {
  SpdcParams p = cfg.source.params();
  const double ds = bandwidth(cfg);
  p.pump_fwhm = cfg.param("pump_ratio") * ds;
  const auto grid = default_grid(p, cfg.grid.spec());
  const auto f = make_jsa(p, grid, grid);
  InterferometerConfig ic;
  ic.tau_H = cfg.param("tau_H_times_bandwidth") / ds;
  const auto hom = tpes_jsa(f, ic);
  const auto marginal = single_mode_spectrum(intensity(hom));
  const auto bins = estimate_dimension(marginal, ic.tau_H);

  const double tau_f0 = cfg.param("tau_F_times_bandwidth") / ds;
  const double period = 2.0 * pi / p.pump();
  const double periods = cfg.param("scan_periods");
  const auto taus = linspace(tau_f0, tau_f0 + periods * period, count_param(cfg, "scan_points", 5));
  std::vector<double> offs_fs;
  for (double t : taus) offs_fs.push_back((t - tau_f0) / units::fs);

  const int half = (bins.dimension - 1) / 2;
  json per_bin = json::array();
  std::vector<double> phases, ks, idx;
  svg::LinePlot plot{"Per-bin Franson fringes", "tau_F offset (fs)", "probability", {}};
  for (int n = -half; n <= half; ++n) {
    const auto field = extract_bin(hom, bins, n);
    const double k = schmidt_number(field).schmidt_number;
    FringeScan fs;
    fs.scan_values = taus;
    fs.probabilities = franson_probabilities(field, taus);
    fs.nominal_phase_rate = p.pump();
    FringeFitOptions fo;
    fo.phase_rate = p.pump();
    const auto fit = fit_fringe(fs, fo);
    phases.push_back(fit.value("phi0"));
    ks.push_back(k);
    idx.push_back(n);
    per_bin.push_back({{"bin", n},
                       {"center_offset_ghz", units::angular_to_ghz(bins.bin_centers[n + half] - bins.center)},
                       {"schmidt_number", k},
                       {"visibility", fit.value("V")},
                       {"phase", fit.value("phi0")}});
    if (cfg.wants("fringe"))
      sink.text("fringe_bin_" + tag(n) + ".csv", "fringe", "Franson fringe of bin " + std::to_string(n),
                table_csv({"tau_F_offset_fs", "probability"}, {offs_fs, fs.probabilities}));
    plot.series.push_back({"bin " + std::to_string(n), offs_fs, fs.probabilities, false});
  }
  double spread = 0.0;
  for (double a : phases)
    for (double b : phases) spread = std::max(spread, std::abs(wrap(a - b)));
  if (cfg.wants("fringe")) sink.text("fringes.svg", "plot", "per-bin Franson fringes", svg::line_plot(plot));
  if (cfg.wants("schmidt"))
    sink.text("per_bin.csv", "schmidt", "per-bin Schmidt numbers and fringe phases",
              table_csv({"bin", "schmidt_number", "phase_rad"}, {idx, ks, phases}));
  rep.results["dimension"] = bins.dimension;
  rep.results["bins"] = per_bin;
  rep.results["max_phase_difference_rad"] = spread;
  rep.check("largest pairwise phase difference (rad)", spread, 0.0, 0.05);
  rep.check("smallest per-bin Schmidt number", *std::min_element(ks.begin(), ks.end()), 1.5, INFINITY);
}

// Table relations: mode spacing, dimension, jitter-limited V_H, and the K_F lower bound.
void table1(const ScenarioConfig& cfg, OutputSink& sink, Report& rep) {
  SpdcParams p = cfg.source.params();
  const double ds = bandwidth(cfg);
  p.pump_fwhm = cfg.param("pump_ratio") * ds;
  const double blur = units::ghz_to_angular(cfg.param("blur_ghz"));
  const auto& taus = cfg.list("tau_H_ps");
  const auto& measured = cfg.list("measured_visibility");
  if (measured.size() != taus.size())
    throw ConfigError("params.measured_visibility: needs one entry per params.tau_H_ps entry");

  const auto grid = default_grid(p, cfg.grid.spec());
  const auto f = make_jsa(p, grid, grid);
  KfOptions ko;
  ko.ladder_points = count_param(cfg, "kf_ladder_points", 2);
  ko.schmidt_points = count_param(cfg, "kf_schmidt_points", 16);
  ko.spectrum_points = count_param(cfg, "kf_spectrum_points", 16);

  std::vector<double> spacing, dims, vh_closed, kf, sat;
  json rows = json::array();
  for (std::size_t r = 0; r < taus.size(); ++r) {
    const double tau = taus[r] * units::ps;
    InterferometerConfig ic;
    ic.tau_H = tau;
    const auto d = estimate_dimension(single_mode_spectrum(intensity(tpes_jsa(f, ic))), tau);
    spacing.push_back(1.0 / (2.0 * tau) * 1e-9);
    dims.push_back(d.dimension);
    vh_closed.push_back(std::exp(-blur * blur * tau * tau / (4.0 * units::ln2)));

    const auto curve = kf_curve(tau, blur, ds, ko);
    json row = {{"tau_H_ps", taus[r]},
                {"mode_spacing_ghz", spacing.back()},
                {"dimension", d.dimension},
                {"jitter_limited_visibility", vh_closed.back()},
                {"measured_visibility", measured[r]}};
    try {
      const auto est = invert_kf_curve(curve, measured[r]);
      kf.push_back(est.kf);
      sat.push_back(est.saturated ? 1 : 0);
      row["kf_lower_bound"] = est.kf;
      row["kf_saturated"] = est.saturated;
      row["kf_pump_ratio"] = est.pump_ratio;
    } catch (const OutOfRange& e) {
      kf.push_back(NAN);
      sat.push_back(0);
      row["kf_lower_bound"] = nullptr;
      row["kf_note"] = e.what();
    }
    rows.push_back(row);
    if (cfg.wants("curve")) {
      std::vector<double> cr, cv, ck;
      for (const auto& c : curve) {
        cr.push_back(c.pump_ratio);
        cv.push_back(c.visibility);
        ck.push_back(c.schmidt_number);
      }
      sink.text("kf_curve_tauH_" + tag(taus[r]) + "ps.csv", "curve", "(V_H, K_F) ladder at tau_H = " + format_number(taus[r]) + " ps",
                table_csv({"pump_ratio", "hom_visibility", "schmidt_number"}, {cr, cv, ck}));
    }
  }
  if (cfg.wants("curve"))
    sink.text("table.csv", "curve", "per-delay table relations",
              table_csv({"tau_H_ps", "mode_spacing_ghz", "dimension", "jitter_limited_visibility", "measured_visibility",
                         "kf_lower_bound", "kf_saturated"},
                        {taus, spacing, dims, vh_closed, measured, kf, sat}));
  rep.results["rows"] = rows;
  for (std::size_t r = 0; r < taus.size(); ++r)
    rep.check("mode spacing 1/(2 tau_H) at " + format_number(taus[r]) + " ps (GHz)", spacing[r], 0.0, INFINITY);
}

}  // namespace hfeq::scenarios::runners
