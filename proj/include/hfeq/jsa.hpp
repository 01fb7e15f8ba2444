#pragma once

#include <optional>

#include "hfeq/spectral.hpp"

namespace hfeq {

enum class JsaModel { gaussian, sinc };

// Bandwidths are intensity FWHMs along the principal axes: the amplitude
// carries exp(-2 ln2 x^2 / FWHM^2), so |f|^2 carries exp(-4 ln2 x^2 / FWHM^2).
struct SpdcParams {
  double omega_s0 = 0.0;             // rad/s
  double omega_i0 = 0.0;             // rad/s
  double pump_fwhm = 0.0;            // Δω_p, rad/s
  double single_photon_fwhm = 0.0;   // Δω_S, rad/s
  std::optional<double> pump_center; // ω_p, defaults to omega_s0 + omega_i0
  JsaModel model = JsaModel::gaussian;

  double pump() const { return pump_center.value_or(omega_s0 + omega_i0); }
  bool degenerate() const { return omega_s0 == omega_i0; }
};

void validate(const SpdcParams& p);

ComplexField2D gaussian_jsa(const SpdcParams& params, const FrequencyGrid& grid_s,
                            const FrequencyGrid& grid_i);
ComplexField2D sinc_jsa(const SpdcParams& params, const FrequencyGrid& grid_s,
                        const FrequencyGrid& grid_i);
// Dispatches on params.model.
ComplexField2D make_jsa(const SpdcParams& params, const FrequencyGrid& grid_s,
                        const FrequencyGrid& grid_i);

// Estimated fraction of the analytic |f|^2 mass outside the grid square
// (largest single-axis tail; the pump spread is ignored for sinc).
double truncated_mass(const SpdcParams& params, const FrequencyGrid& grid_s,
                      const FrequencyGrid& grid_i);

struct GridSpec {
  std::size_t n_points = 512;
  // Half-width in units of max(Δω_S, Δω_p). 0 picks the model default:
  // 4 for the Gaussian, 20 for sinc (its 1/x^2 tails decay slowly).
  double extent = 0.0;
};

// Square grid centred between the two photon centres and wide enough to hold
// both of them.
FrequencyGrid default_grid(const SpdcParams& params, const GridSpec& spec = {});

// Sine integral Si(x).
double sine_integral(double x);

}  // namespace hfeq
