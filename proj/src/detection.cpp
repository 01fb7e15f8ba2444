#include "hfeq/detection.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hfeq/errors.hpp"
#include "hfeq/parallel.hpp"
#include "hfeq/units.hpp"

namespace hfeq {

void validate(const TofsCalibration& cal) {
  if (!(cal.slope != 0.0) || !std::isfinite(cal.slope) || !std::isfinite(cal.intercept))
    throw InvalidArgument("TofsCalibration: slope must be finite and non-zero");
  if (!(cal.jitter_fwhm >= 0.0) || !std::isfinite(cal.jitter_fwhm))
    throw InvalidArgument("TofsCalibration: jitter must be finite and >= 0");
  if (!(cal.band_max_nm > cal.band_min_nm) || !(cal.band_min_nm > 0.0))
    throw InvalidArgument("TofsCalibration: empty calibrated band");
}

namespace {

void check_band(double lambda_nm, const TofsCalibration& cal) {
  const double tol = 1e-9;
  if (!(lambda_nm >= cal.band_min_nm - tol && lambda_nm <= cal.band_max_nm + tol))
    throw RangeError("ToFS: wavelength " + std::to_string(lambda_nm) + " nm outside calibrated band [" +
                     std::to_string(cal.band_min_nm) + ", " + std::to_string(cal.band_max_nm) + "] nm");
}

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double tofs_time(double lambda_nm, const TofsCalibration& cal) {
  validate(cal);
  check_band(lambda_nm, cal);
  return cal.slope * lambda_nm + cal.intercept;
}

double tofs_wavelength(double t_ns, const TofsCalibration& cal) {
  validate(cal);
  const double lambda = (t_ns - cal.intercept) / cal.slope;
  check_band(lambda, cal);
  return lambda;
}

double tofs_angular_frequency(double t_ns, const TofsCalibration& cal) {
  return units::wavelength_nm_to_angular(tofs_wavelength(t_ns, cal));
}

double tofs_wavelength_resolution(const TofsCalibration& cal) {
  validate(cal);
  return (cal.jitter_fwhm / units::ns) / std::abs(cal.slope);
}

double tofs_frequency_resolution(const TofsCalibration& cal, double lambda_nm) {
  return units::wavelength_interval_to_angular(tofs_wavelength_resolution(cal), lambda_nm);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t key)
    : state_(splitmix(seed ^ splitmix(key ^ 0x6a09e667f3bcc909ULL))) {}

CounterRng::result_type CounterRng::operator()() {
  ++counter_;
  return splitmix(state_ + counter_ * 0xd1b54a32d192ed03ULL);
}

RealHistogram expected_counts(const Spectrum1D& spec, const TofsCalibration& cal,
                              const NoiseModel& noise, const Binning& binning) {
  validate(cal);
  if (!(noise.background_rate >= 0.0) || !(noise.total_signal_counts >= 0.0) ||
      !std::isfinite(noise.background_rate) || !std::isfinite(noise.total_signal_counts))
    throw InvalidArgument("synthesize_counts: noise rates must be finite and >= 0");
  const auto& g = spec.grid();
  if (!(g.lo() > 0.0)) throw InvalidArgument("synthesize_counts: spectrum must sit at optical frequencies");

  const double lambda_c = units::angular_to_wavelength_nm(g.center());
  const Spectrum1D blurred = convolve_gaussian(spec, tofs_frequency_resolution(cal, lambda_c));

  const double t_a = tofs_time(units::angular_to_wavelength_nm(g.lo()), cal);
  const double t_b = tofs_time(units::angular_to_wavelength_nm(g.hi()), cal);
  const double t_min = std::min(t_a, t_b);
  const double t_max = std::max(t_a, t_b);

  const double jitter_ns = cal.jitter_fwhm / units::ns;
  double width = binning.bin_width / units::ns;
  if (!(width >= 0.0) || !std::isfinite(width)) throw InvalidArgument("synthesize_counts: bad bin width");
  if (width == 0.0) width = jitter_ns > 0.0 ? jitter_ns / 4.0 : (t_max - t_min) / 512.0;
  if (jitter_ns > 0.0 && width > jitter_ns / 4.0 * (1.0 + 1e-12))
    throw ResolutionError("synthesize_counts: bin width " + std::to_string(width * 1e3) +
                          " ps does not resolve the jitter (need <= " + std::to_string(jitter_ns * 250.0) + " ps)");
  const auto nbins = static_cast<std::size_t>(std::floor((t_max - t_min) / width * (1.0 + 1e-12)));
  if (nbins < 1) throw InvalidArgument("synthesize_counts: bin width exceeds the mapped time span");

  const CumulativeIntegral cum(blurred);
  RealHistogram out;
  out.unit = EdgeUnit::seconds;
  out.bin_edges.resize(nbins + 1);
  out.values.resize(nbins);
  std::vector<double> w_edges(nbins + 1);
  for (std::size_t k = 0; k <= nbins; ++k) {
    const double t = t_min + static_cast<double>(k) * width;
    out.bin_edges[k] = t * units::ns;
    w_edges[k] = tofs_angular_frequency(t, cal);
  }
  double total = 0.0;
  for (std::size_t k = 0; k < nbins; ++k) {
    out.values[k] = std::abs(cum.between(std::min(w_edges[k], w_edges[k + 1]),
                                         std::max(w_edges[k], w_edges[k + 1])));
    total += out.values[k];
  }
  if (!(total > 0.0)) throw InvalidArgument("synthesize_counts: spectrum carries no weight");
  const double scale = noise.total_signal_counts / total;
  for (double& v : out.values) v = v * scale + noise.background_rate;
  return out;
}

CountHistogram poisson_sample(const RealHistogram& expected, std::uint64_t seed) {
  CountHistogram out;
  out.bin_edges = expected.bin_edges;
  out.unit = expected.unit;
  out.counts.resize(expected.values.size());
  parallel::for_each_index(expected.values.size(), [&](std::size_t k) {
    const double mean = expected.values[k];
    if (!(mean > 0.0)) {
      out.counts[k] = 0;
      return;
    }
    CounterRng rng(seed, k);
    std::poisson_distribution<std::int64_t> draw(mean);
    out.counts[k] = draw(rng);
  });
  return out;
}

CountHistogram synthesize_counts(const Spectrum1D& spec, const TofsCalibration& cal,
                                 const NoiseModel& noise, const Binning& binning) {
  return poisson_sample(expected_counts(spec, cal, noise, binning), noise.rng_seed);
}

RealHistogram subtract_background(const CountHistogram& hist, double background_estimate) {
  if (!(background_estimate >= 0.0) || !std::isfinite(background_estimate))
    throw InvalidArgument("subtract_background: estimate must be finite and >= 0");
  RealHistogram out;
  out.bin_edges = hist.bin_edges;
  out.unit = hist.unit;
  out.values.reserve(hist.counts.size());
  for (auto c : hist.counts) out.values.push_back(std::max(static_cast<double>(c) - background_estimate, 0.0));
  return out;
}

CountHistogram to_frequency(const CountHistogram& hist, const TofsCalibration& cal) {
  if (hist.unit != EdgeUnit::seconds) throw InvalidArgument("to_frequency: histogram is not in arrival time");
  CountHistogram out;
  out.unit = EdgeUnit::radians_per_second;
  out.counts = hist.counts;
  out.bin_edges.reserve(hist.bin_edges.size());
  for (double t : hist.bin_edges) out.bin_edges.push_back(tofs_angular_frequency(t / units::ns, cal));
  if (out.bin_edges.size() > 1 && out.bin_edges.front() > out.bin_edges.back()) {
    std::reverse(out.bin_edges.begin(), out.bin_edges.end());
    std::reverse(out.counts.begin(), out.counts.end());
  }
  return out;
}

}  // namespace hfeq
