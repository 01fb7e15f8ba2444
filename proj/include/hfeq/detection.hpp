#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "hfeq/spectral.hpp"

namespace hfeq {

// Affine fibre dispersion map t[ns] = slope * λ[nm] + intercept.
struct TofsCalibration {
  double slope = -1.58597;     // ns/nm
  double intercept = 2458.26;  // ns
  double jitter_fwhm = 49.1e-12;  // s
  double band_min_nm = 1540.0;
  double band_max_nm = 1560.0;
};

void validate(const TofsCalibration& cal);

struct NoiseModel {
  double background_rate = 0.0;       // counts per histogram bin
  double total_signal_counts = 1e6;   // expected true coincidences over the histogram
  std::uint64_t rng_seed = 0;
};

enum class EdgeUnit { seconds, radians_per_second, radians };

struct CountHistogram {
  std::vector<double> bin_edges;
  std::vector<std::int64_t> counts;
  EdgeUnit unit = EdgeUnit::seconds;
};

struct RealHistogram {
  std::vector<double> bin_edges;
  std::vector<double> values;
  EdgeUnit unit = EdgeUnit::seconds;
};

double tofs_time(double lambda_nm, const TofsCalibration& cal);         // ns
double tofs_wavelength(double t_ns, const TofsCalibration& cal);        // nm
double tofs_angular_frequency(double t_ns, const TofsCalibration& cal); // rad/s

// |jitter / slope| in nm.
double tofs_wavelength_resolution(const TofsCalibration& cal);
// Jitter expressed as an angular-frequency FWHM at the given wavelength.
double tofs_frequency_resolution(const TofsCalibration& cal, double lambda_nm);

struct Binning {
  // Arrival-time bin width in seconds; 0 means jitter/4, or 1/512 of the
  // mapped time span when the jitter is zero.
  double bin_width = 0.0;
};

// Counter-based generator: output k of stream (seed, key) is a pure function
// of (seed, key, k), so histograms do not depend on scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  CounterRng(std::uint64_t seed, std::uint64_t key);
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

 private:
  std::uint64_t state_;
  std::uint64_t counter_ = 0;
};

// Expected (noise-free) counts per arrival-time bin, including background.
RealHistogram expected_counts(const Spectrum1D& spec, const TofsCalibration& cal,
                              const NoiseModel& noise, const Binning& binning = {});

CountHistogram synthesize_counts(const Spectrum1D& spec, const TofsCalibration& cal,
                                 const NoiseModel& noise, const Binning& binning = {});

// Poisson draw of every bin of an expectation record.
CountHistogram poisson_sample(const RealHistogram& expected, std::uint64_t seed);

RealHistogram subtract_background(const CountHistogram& hist, double background_estimate);

// Re-express arrival-time edges as angular frequency, ascending.
CountHistogram to_frequency(const CountHistogram& hist, const TofsCalibration& cal);

}  // namespace hfeq
