#include "hfeq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "hfeq/errors.hpp"
#include "hfeq/interferometer.hpp"
#include "hfeq/jsa.hpp"
#include "hfeq/linalg.hpp"
#include "hfeq/parallel.hpp"
#include "hfeq/units.hpp"

namespace hfeq {

Spectrum1D single_mode_spectrum(const RealField2D& jsi) {
  return marginal_spectrum(jsi, Axis::signal);
}

double hom_visibility(const Spectrum1D& spec, const Spectrum1D& reference) {
  if (!(spec.grid() == reference.grid()))
    throw InvalidArgument("hom_visibility: spectrum and reference grids differ");
  const auto& r = reference.values();
  const double peak = *std::max_element(r.begin(), r.end());
  if (!(peak > 0.0)) throw InvalidArgument("hom_visibility: reference spectrum is zero");
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (r[k] < 0.01 * peak) continue;
    const double q = spec[k] / r[k];
    hi = std::max(hi, q);
    lo = std::min(lo, q);
  }
  if (!(hi + lo > 0.0)) throw InvalidArgument("hom_visibility: spectrum vanishes over the reference region");
  return (hi - lo) / (hi + lo);
}

SchmidtResult schmidt_number(const ComplexField2D& jsa) {
  if (!jsa.square()) throw InvalidArgument("schmidt_number: grid must be square");
  const std::size_t ns = jsa.n_s(), ni = jsa.n_i();
  const double scale = std::sqrt(jsa.grid_s().spacing() * jsa.grid_i().spacing());
  Eigen::MatrixXcd a(ns, ni);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t i = 0; i < ni; ++i) {
      const cplx v = jsa(s, i);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw InvalidArgument("schmidt_number: non-finite amplitude");
      a(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i)) = v * scale;
    }

  const auto sv = linalg::singular_values(a);
  SchmidtResult out;
  out.sweeps = sv.sweeps;
  out.rank = sv.rank;
  double total = 0.0;
  for (double s : sv.values) total += s * s;
  double purity = 0.0;
  out.coefficients.reserve(sv.values.size());
  for (double s : sv.values) {
    const double l = s * s / total;
    out.coefficients.push_back(l);
    purity += l * l;
  }
  out.schmidt_number = 1.0 / purity;
  return out;
}

BinDecomposition estimate_dimension(const Spectrum1D& spec, double tau_H,
                                    const DimensionOptions& opt) {
  if (!(tau_H > 0.0) || !std::isfinite(tau_H))
    throw InvalidArgument("estimate_dimension: tau_H must be positive");
  if (!(opt.window_fraction > 0.0 && opt.window_fraction <= 0.5))
    throw InvalidArgument("estimate_dimension: window_fraction must lie in (0, 0.5]");
  if (!(opt.threshold > 0.0 && opt.threshold < 1.0))
    throw InvalidArgument("estimate_dimension: threshold must lie in (0, 1)");
  const auto& g = spec.grid();

  double center = 0.0;
  if (opt.center) {
    center = *opt.center;
  } else {
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
      m0 += g.weight(k) * spec[k];
      m1 += g.weight(k) * spec[k] * (g.at(k) - g.center());
    }
    if (!(m0 > 0.0)) throw DegenerateInput("estimate_dimension: spectrum has no weight");
    center = g.center() + m1 / m0;
  }

  const double d = units::pi / tau_H;
  const double hw = opt.window_fraction * d;
  const int kmin = static_cast<int>(std::ceil((g.lo() - center) / d));
  const int kmax = static_cast<int>(std::floor((g.hi() - center) / d));
  if (kmax < kmin) throw DegenerateInput("estimate_dimension: no lattice point on the grid");

  const CumulativeIntegral cum(spec);
  BinDecomposition out;
  out.center = center;
  out.window_half_width = hw;
  out.lattice_min_index = kmin;
  double best = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    const double c = center + k * d;
    out.lattice_weights.push_back(cum.between(c - hw, c + hw));
    best = std::max(best, out.lattice_weights.back());
  }
  if (!(best > 0.0)) throw DegenerateInput("estimate_dimension: no peak above threshold");

  int reach = 0;
  for (int k = kmin; k <= kmax; ++k)
    if (out.lattice_weights[static_cast<std::size_t>(k - kmin)] >= opt.threshold * best)
      reach = std::max(reach, std::abs(k));

  out.dimension = 2 * reach + 1;
  double sum = 0.0;
  for (int k = -reach; k <= reach; ++k) {
    const double c = center + k * d;
    out.bin_centers.push_back(c);
    const double w = (k >= kmin && k <= kmax) ? out.lattice_weights[static_cast<std::size_t>(k - kmin)]
                                               : cum.between(c - hw, c + hw);
    out.bin_weights.push_back(w);
    sum += w;
  }
  for (double& w : out.bin_weights) w /= sum;
  return out;
}

ComplexField2D extract_bin(const ComplexField2D& jsa, const BinDecomposition& decomp, int n) {
  const int half = (decomp.dimension - 1) / 2;
  if (decomp.dimension < 1 || static_cast<int>(decomp.bin_centers.size()) != decomp.dimension)
    throw InvalidArgument("extract_bin: malformed decomposition");
  if (std::abs(n) > half)
    throw OutOfRange("extract_bin: bin index " + std::to_string(n) + " outside [-" +
                     std::to_string(half) + ", " + std::to_string(half) + "]");
  const double c = decomp.bin_centers[static_cast<std::size_t>(n + half)];
  const double hw = decomp.window_half_width;
  const auto& g = jsa.grid_s();
  const double h = g.spacing();

  ComplexField2D out = jsa;
  for (std::size_t s = 0; s < jsa.n_s(); ++s) {
    const double dist = std::abs(g.at(s) - c);
    double w;
    if (dist <= hw - 0.5 * h) w = 1.0;
    else if (dist >= hw + 0.5 * h) w = 0.0;
    else w = 0.5 * (1.0 + std::cos(units::pi * (dist - (hw - 0.5 * h)) / h));
    for (auto& v : out.row(s)) v *= w;
  }
  return out;
}

std::vector<KfCurvePoint> kf_curve(double tau_H, double jitter_fwhm, double delta_omega_S,
                                   const KfOptions& opt) {
  if (!(tau_H > 0.0)) throw InvalidArgument("kf_curve: tau_H must be positive");
  if (!(jitter_fwhm >= 0.0)) throw InvalidArgument("kf_curve: jitter must be >= 0");
  if (!(delta_omega_S > 0.0)) throw InvalidArgument("kf_curve: bandwidth must be positive");
  if (opt.ladder_points < 2 || !(opt.ratio_min > 0.0) || !(opt.ratio_max > opt.ratio_min))
    throw InvalidArgument("kf_curve: bad ladder");

  const std::size_t m = opt.ladder_points;
  std::vector<KfCurvePoint> curve(m);
  const FrequencyGrid gv = make_grid(0.0, 2.0 * opt.extent * delta_omega_S, opt.spectrum_points);
  const FrequencyGrid gk = make_grid(0.0, 2.0 * opt.extent * delta_omega_S, opt.schmidt_points);
  InterferometerConfig cfg;
  cfg.tau_H = tau_H;

  parallel::for_each_index(m, [&](std::size_t j) {
    const double ratio = opt.ratio_max *
        std::pow(opt.ratio_min / opt.ratio_max, static_cast<double>(j) / static_cast<double>(m - 1));
    SpdcParams p;
    p.single_photon_fwhm = delta_omega_S;
    p.pump_fwhm = ratio * delta_omega_S;

    const ComplexField2D f = gaussian_jsa(p, gv, gv);
    const Spectrum1D comb = convolve_gaussian(single_mode_spectrum(intensity(tpes_jsa(f, cfg))), jitter_fwhm);
    const Spectrum1D ref = convolve_gaussian(single_mode_spectrum(intensity(f)), jitter_fwhm);

    curve[j].pump_ratio = ratio;
    curve[j].visibility = hom_visibility(comb, ref);
    curve[j].schmidt_number = schmidt_number(tpes_jsa(gaussian_jsa(p, gk, gk), cfg)).schmidt_number;
  });
  return curve;
}

KfEstimate invert_kf_curve(const std::vector<KfCurvePoint>& curve, double v_h) {
  if (!(v_h > 0.0 && v_h <= 1.0)) throw InvalidArgument("kf_from_visibility: v_h must lie in (0, 1]");
  if (curve.empty()) throw InvalidArgument("kf_from_visibility: empty curve");
  double vmin = curve.front().visibility, vmax = vmin;
  for (const auto& c : curve) {
    vmin = std::min(vmin, c.visibility);
    vmax = std::max(vmax, c.visibility);
  }
  if (v_h < vmin) {
    std::ostringstream msg;
    msg << "kf_from_visibility: v_h = " << v_h << " below the model curve (V_H spans [" << vmin
        << ", " << vmax << "])";
    throw OutOfRange(msg.str());
  }
  KfEstimate out;
  out.curve = curve;
  out.saturated = v_h >= vmax;
  for (const auto& c : curve) {
    if (c.visibility <= v_h && c.schmidt_number > out.kf) {
      out.kf = c.schmidt_number;
      out.pump_ratio = c.pump_ratio;
    }
  }
  return out;
}

KfEstimate kf_from_visibility(double v_h, double tau_H, double jitter_fwhm, double delta_omega_S,
                              const KfOptions& opt) {
  if (!(v_h > 0.0 && v_h <= 1.0)) throw InvalidArgument("kf_from_visibility: v_h must lie in (0, 1]");
  return invert_kf_curve(kf_curve(tau_H, jitter_fwhm, delta_omega_S, opt), v_h);
}

}  // namespace hfeq
