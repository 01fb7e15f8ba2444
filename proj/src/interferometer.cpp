#include "hfeq/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hfeq/errors.hpp"
#include "hfeq/parallel.hpp"
#include "hfeq/units.hpp"

namespace hfeq {

InterferometerConfig InterferometerConfig::from_arms(double tau_l, double tau_s, double tau_H,
                                                     PhaseMode mode) {
  InterferometerConfig c;
  c.tau_l = tau_l;
  c.tau_s = tau_s;
  c.tau_F = tau_l - tau_s;
  c.tau_H = tau_H;
  c.phase_mode = mode;
  return c;
}

void validate(const InterferometerConfig& cfg) {
  if (!std::isfinite(cfg.tau_H) || !std::isfinite(cfg.tau_F))
    throw InvalidArgument("InterferometerConfig: non-finite delay");
  if (cfg.tau_l.has_value() != cfg.tau_s.has_value())
    throw InvalidArgument("InterferometerConfig: give both arm times or neither");
  if (cfg.tau_l && cfg.tau_F != *cfg.tau_l - *cfg.tau_s)
    throw InvalidArgument("InterferometerConfig: tau_F must equal tau_l - tau_s");
}

double nyquist_spacing(double tau_H, double tau_F) {
  const double tau = std::max({std::abs(tau_H), 0.5 * std::abs(tau_F), units::fs});
  return units::pi / (4.0 * tau);
}

namespace {

void require_square(const ComplexField2D& f, const char* who) {
  if (!f.square())
    throw InvalidArgument(std::string(who) + ": signal and idler grids must be identical");
}

void require_nyquist(const FrequencyGrid& g, double tau_H, double tau_F, const char* who) {
  const double limit = nyquist_spacing(tau_H, tau_F);
  if (g.spacing() > limit)
    throw ResolutionError(std::string(who) + ": grid spacing " + std::to_string(g.spacing()) +
                          " rad/s exceeds the sampling limit " + std::to_string(limit) +
                          " rad/s for the requested delays");
}

// e^{i (Ω - centre) t} per sample.
std::vector<cplx> relative_phasors(const FrequencyGrid& g, double t) {
  std::vector<cplx> out(g.n_points());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::polar(1.0, (g.at(k) - g.center()) * t);
  return out;
}

struct HalfAngles {
  std::vector<double> c, s;
};

// cos and sin of Ω τ_F / 2 on absolute frequencies; cos(Ω₊τ_F/2) is then
// c_s c_i - s_s s_i, which is exactly symmetric in the two photons.
HalfAngles franson_half_angles(const FrequencyGrid& g, double tau_F) {
  HalfAngles h{std::vector<double>(g.n_points()), std::vector<double>(g.n_points())};
  for (std::size_t k = 0; k < g.n_points(); ++k) {
    const double a = 0.5 * g.at(k) * tau_F;
    h.c[k] = std::cos(a);
    h.s[k] = std::sin(a);
  }
  return h;
}

}  // namespace

ComplexField2D tpes_jsa(const ComplexField2D& f, const InterferometerConfig& cfg) {
  validate(cfg);
  require_square(f, "tpes_jsa");
  const auto& g = f.grid_s();
  require_nyquist(g, cfg.tau_H, cfg.tau_F, "tpes_jsa");

  // A negative τ_H needs no special branch: the expression below at -|τ_H|
  // equals the axis-swapped result at |τ_H|.
  const auto p = relative_phasors(g, 0.5 * cfg.tau_H);
  const auto fr = franson_half_angles(g, cfg.tau_F);
  ComplexField2D out(g, g);
  const std::size_t n = g.n_points();
  parallel::for_each_index(n, [&](std::size_t s) {
    for (std::size_t i = 0; i < n; ++i) {
      const cplx hom = 0.5 * (f(s, i) * (p[s] * std::conj(p[i])) +
                              f(i, s) * (std::conj(p[s]) * p[i]));
      out(s, i) = hom * (fr.c[s] * fr.c[i] - fr.s[s] * fr.s[i]);
    }
  });
  return out;
}

ComplexField2D tpes_jsa_degenerate(const ComplexField2D& f, const InterferometerConfig& cfg) {
  validate(cfg);
  require_square(f, "tpes_jsa_degenerate");
  const auto& g = f.grid_s();
  require_nyquist(g, cfg.tau_H, cfg.tau_F, "tpes_jsa_degenerate");
  const std::size_t n = g.n_points();

  double peak = 0.0, asym = 0.0;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t i = 0; i < n; ++i) {
      peak = std::max(peak, std::abs(f(s, i)));
      asym = std::max(asym, std::abs(f(s, i) - f(i, s)));
    }
  if (asym > 1e-12 * peak)
    throw InvalidArgument("tpes_jsa_degenerate: input amplitude is not exchange-symmetric");

  ComplexField2D out(g, g);
  parallel::for_each_index(n, [&](std::size_t s) {
    const double xs = g.at(s) - g.center();
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = g.at(i) - g.center();
      const double wplus = g.at(s) + g.at(i);
      out(s, i) = f(s, i) * (std::cos(0.5 * wplus * cfg.tau_F) * std::cos(0.5 * (xs - xi) * cfg.tau_H));
    }
  });
  return out;
}

ComplexField2D apply_franson(const ComplexField2D& field, double tau_F) {
  if (!std::isfinite(tau_F)) throw InvalidArgument("apply_franson: non-finite tau_F");
  require_square(field, "apply_franson");
  const auto& g = field.grid_s();
  require_nyquist(g, 0.0, tau_F, "apply_franson");
  const auto fr = franson_half_angles(g, tau_F);
  ComplexField2D out = field;
  const std::size_t n = g.n_points();
  parallel::for_each_index(n, [&](std::size_t s) {
    for (std::size_t i = 0; i < n; ++i) out(s, i) *= fr.c[s] * fr.c[i] - fr.s[s] * fr.s[i];
  });
  return out;
}

RealField2D satellite_jsi(const ComplexField2D& f, double tau_H) {
  if (!std::isfinite(tau_H)) throw InvalidArgument("satellite_jsi: non-finite tau_H");
  require_square(f, "satellite_jsi");
  const auto& g = f.grid_s();
  require_nyquist(g, tau_H, 0.0, "satellite_jsi");
  const auto q = relative_phasors(g, tau_H);
  RealField2D out(g, g);
  const std::size_t n = g.n_points();
  parallel::for_each_index(n, [&](std::size_t s) {
    for (std::size_t i = 0; i < n; ++i)
      out(s, i) = std::norm(f(s, i) - f(i, s) * (std::conj(q[s]) * q[i])) / 16.0;
  });
  return out;
}

RealField2D satellite_jsi_degenerate(const ComplexField2D& f, double tau_H) {
  if (!std::isfinite(tau_H)) throw InvalidArgument("satellite_jsi_degenerate: non-finite tau_H");
  require_square(f, "satellite_jsi_degenerate");
  const auto& g = f.grid_s();
  require_nyquist(g, tau_H, 0.0, "satellite_jsi_degenerate");
  RealField2D out(g, g);
  const std::size_t n = g.n_points();
  parallel::for_each_index(n, [&](std::size_t s) {
    for (std::size_t i = 0; i < n; ++i) {
      const double wm = (g.at(s) - g.center()) - (g.at(i) - g.center());
      out(s, i) = std::norm(f(s, i)) * (1.0 - std::cos(wm * tau_H)) / 8.0;
    }
  });
  return out;
}

double coincidence_probability(const RealField2D& jsi) { return integrate_2d(jsi); }

std::vector<double> franson_probabilities(const ComplexField2D& field,
                                          const std::vector<double>& tau_F_values) {
  require_square(field, "franson_probabilities");
  const auto& g = field.grid_s();
  for (double t : tau_F_values) {
    if (!std::isfinite(t)) throw InvalidArgument("franson_probabilities: non-finite tau_F");
    require_nyquist(g, 0.0, t, "franson_probabilities");
  }
  const RealField2D jsi = intensity(field);
  const std::size_t n = g.n_points();
  std::vector<double> out(tau_F_values.size());
  parallel::for_each_index(tau_F_values.size(), [&](std::size_t k) {
    const auto fr = franson_half_angles(g, tau_F_values[k]);
    double total = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      double row = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double c = fr.c[s] * fr.c[i] - fr.s[s] * fr.s[i];
        row += g.weight(i) * jsi(s, i) * c * c;
      }
      total += g.weight(s) * row;
    }
    out[k] = total;
  });
  return out;
}

FringeScan fringe_scan(const SpdcParams& params, const InterferometerConfig& cfg,
                       const std::vector<double>& scan, const GridSpec& grid) {
  validate(cfg);
  if (scan.empty()) throw InvalidArgument("fringe_scan: empty scan");
  FringeScan out;
  out.scan_values = scan;
  out.mode = cfg.phase_mode;

  if (cfg.phase_mode == PhaseMode::delay_scan) {
    const FrequencyGrid g = default_grid(params, grid);
    const ComplexField2D f = make_jsa(params, g, g);
    InterferometerConfig hom = cfg;
    hom.tau_F = 0.0;
    hom.tau_l.reset();
    hom.tau_s.reset();
    out.probabilities = franson_probabilities(tpes_jsa(f, hom), scan);
    out.nominal_phase_rate = params.pump();
    return out;
  }

  const FrequencyGrid g0 = default_grid(params, grid);
  out.probabilities.resize(scan.size());
  parallel::for_each_index(scan.size(), [&](std::size_t k) {
    const double d = scan[k];
    SpdcParams p = params;
    p.omega_s0 += 0.5 * d;
    p.omega_i0 += 0.5 * d;
    p.pump_center = params.pump() + d;
    const FrequencyGrid g = make_grid(g0.center() + 0.5 * d, g0.span(), g0.n_points());
    out.probabilities[k] = coincidence_probability(intensity(tpes_jsa(make_jsa(p, g, g), cfg)));
  });
  out.nominal_phase_rate = cfg.tau_F;
  return out;
}

}  // namespace hfeq
