#include "hfeq/jsa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hfeq/errors.hpp"
#include "hfeq/parallel.hpp"
#include "hfeq/units.hpp"

namespace hfeq {

using units::ln2;
using units::pi;

void validate(const SpdcParams& p) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(p.omega_s0) || !finite(p.omega_i0) || !finite(p.pump()))
    throw InvalidArgument("SpdcParams: non-finite centre frequency");
  if (!(p.pump_fwhm > 0.0) || !finite(p.pump_fwhm))
    throw InvalidArgument("SpdcParams: pump bandwidth must be positive");
  if (!(p.single_photon_fwhm > 0.0) || !finite(p.single_photon_fwhm))
    throw InvalidArgument("SpdcParams: single-photon bandwidth must be positive");
}

double sine_integral(double x) {
  if (x < 0.0) return -sine_integral(-x);
  if (x == 0.0) return 0.0;
  // Composite Simpson on sin(t)/t; the integrand is entire so this converges fast.
  std::size_t n = std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(x / 0.02)));
  if (n % 2) ++n;
  const double h = x / static_cast<double>(n);
  auto f = [](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; };
  double acc = f(0.0) + f(x);
  for (std::size_t k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(static_cast<double>(k) * h);
  return acc * h / 3.0;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// CDF of the density sinc^2(x/w)/(pi w).
double sinc2_cdf(double x, double w) {
  const double X = std::abs(x) / w;
  double inner = 0.0;  // (1/pi) * integral_0^X sinc^2
  if (X > 0.0) inner = (sine_integral(2.0 * X) - std::sin(X) * std::sin(X) / X) / pi;
  return x >= 0.0 ? 0.5 + inner : 0.5 - inner;
}

double axis_tail(const SpdcParams& p, const FrequencyGrid& g, double centre) {
  // Marginal of one photon's detuning is centred at -(pump offset)/2.
  const double po = p.omega_s0 + p.omega_i0 - p.pump();
  const double a = g.lo() - centre;
  const double b = g.hi() - centre;
  if (p.model == JsaModel::gaussian) {
    const double sigma = std::sqrt((p.single_photon_fwhm * p.single_photon_fwhm +
                                    p.pump_fwhm * p.pump_fwhm) / (32.0 * ln2));
    const double mu = -0.5 * po;
    return normal_cdf((a - mu) / sigma) + (1.0 - normal_cdf((b - mu) / sigma));
  }
  // detuning ≈ (ω_- - po)/2 with ω_- ~ sinc^2
  const double w = p.single_photon_fwhm;
  return sinc2_cdf(2.0 * a + po, w) + (1.0 - sinc2_cdf(2.0 * b + po, w));
}

void check_grids(const SpdcParams& p, const FrequencyGrid& gs, const FrequencyGrid& gi,
                 const char* who) {
  validate(p);
  if (!gs.contains(p.omega_s0) || !gi.contains(p.omega_i0))
    throw InvalidArgument(std::string(who) + ": photon centre frequency outside its grid");
  const double lost = truncated_mass(p, gs, gi);
  if (lost >= 0.01)
    throw TruncationError(std::string(who) + ": grid too narrow, estimated " +
                          std::to_string(100.0 * lost) + "% of the spectral mass falls outside");
}

template <typename Amp>
ComplexField2D build(const SpdcParams& p, const FrequencyGrid& gs, const FrequencyGrid& gi,
                     Amp amp) {
  ComplexField2D f(gs, gi);
  const double po = p.omega_s0 + p.omega_i0 - p.pump();
  parallel::for_each_index(gs.n_points(), [&](std::size_t s) {
    const double ds = gs.at(s) - p.omega_s0;
    auto row = f.row(s);
    for (std::size_t i = 0; i < row.size(); ++i) {
      const double di = gi.at(i) - p.omega_i0;
      row[i] = amp(ds - di, ds + di + po);
    }
  });
  return normalize_l2(f);
}

}  // namespace

double truncated_mass(const SpdcParams& p, const FrequencyGrid& gs, const FrequencyGrid& gi) {
  return std::max(axis_tail(p, gs, p.omega_s0), axis_tail(p, gi, p.omega_i0));
}

ComplexField2D gaussian_jsa(const SpdcParams& p, const FrequencyGrid& gs,
                            const FrequencyGrid& gi) {
  SpdcParams q = p;
  q.model = JsaModel::gaussian;
  check_grids(q, gs, gi, "gaussian_jsa");
  const double cm = -2.0 * ln2 / (p.single_photon_fwhm * p.single_photon_fwhm);
  const double cp = -2.0 * ln2 / (p.pump_fwhm * p.pump_fwhm);
  return build(q, gs, gi, [=](double wm, double wp) {
    return cplx(std::exp(cm * wm * wm + cp * wp * wp), 0.0);
  });
}

ComplexField2D sinc_jsa(const SpdcParams& p, const FrequencyGrid& gs, const FrequencyGrid& gi) {
  SpdcParams q = p;
  q.model = JsaModel::sinc;
  check_grids(q, gs, gi, "sinc_jsa");
  const double w = p.single_photon_fwhm;
  const double cp = -2.0 * ln2 / (p.pump_fwhm * p.pump_fwhm);
  return build(q, gs, gi, [=](double wm, double wp) {
    const double x = wm / w;
    const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
    return cplx(sinc * std::exp(cp * wp * wp), 0.0);
  });
}

ComplexField2D make_jsa(const SpdcParams& p, const FrequencyGrid& gs, const FrequencyGrid& gi) {
  return p.model == JsaModel::sinc ? sinc_jsa(p, gs, gi) : gaussian_jsa(p, gs, gi);
}

FrequencyGrid default_grid(const SpdcParams& p, const GridSpec& spec) {
  validate(p);
  const double extent = spec.extent > 0.0 ? spec.extent
                                          : (p.model == JsaModel::sinc ? 20.0 : 4.0);
  const double po = p.omega_s0 + p.omega_i0 - p.pump();
  const double half = 0.5 * std::abs(p.omega_s0 - p.omega_i0) + 0.5 * std::abs(po) +
                      extent * std::max(p.single_photon_fwhm, p.pump_fwhm);
  return make_grid(0.5 * (p.omega_s0 + p.omega_i0), 2.0 * half, spec.n_points);
}

}  // namespace hfeq
