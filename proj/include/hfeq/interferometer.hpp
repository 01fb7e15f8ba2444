#pragma once

#include <optional>
#include <vector>

#include "hfeq/jsa.hpp"
#include "hfeq/spectral.hpp"

namespace hfeq {

enum class PhaseMode { delay_scan, pump_scan };

struct InterferometerConfig {
  double tau_H = 0.0;  // s, HOM delay on the signal (H) photon
  double tau_F = 0.0;  // s, long minus short arm
  std::optional<double> tau_l;
  std::optional<double> tau_s;
  PhaseMode phase_mode = PhaseMode::delay_scan;

  static InterferometerConfig from_arms(double tau_l, double tau_s, double tau_H,
                                        PhaseMode mode = PhaseMode::delay_scan);
};

void validate(const InterferometerConfig& cfg);

struct FringeScan {
  std::vector<double> scan_values;    // tau_F in s, or pump offset in rad/s
  std::vector<double> probabilities;
  PhaseMode mode = PhaseMode::delay_scan;
  // Expected fringe angular rate in the scan variable: ω_p for delay scans,
  // τ_F for pump scans. Used to seed sinusoid fits.
  double nominal_phase_rate = 0.0;
};

// Largest grid spacing that samples cos(Ω τ) without aliasing.
double nyquist_spacing(double tau_H, double tau_F);

// Two-photon entangled state amplitude after the HOM + Franson stages:
//   J = ½[f(s,i) e^{iΩ₋τ_H/2} + f(i,s) e^{-iΩ₋τ_H/2}] cos(Ω₊τ_F/2).
// The common local phase e^{-iΩ₋τ_H/2} of the exchange form is dropped along
// with the global phase, so a symmetric f gives f cos(Ω₊τ_F/2) cos(Ω₋τ_H/2)
// exactly. Negative τ_H swaps the photon roles.
ComplexField2D tpes_jsa(const ComplexField2D& jsa, const InterferometerConfig& cfg);

// Closed form for a symmetric (degenerate) input.
ComplexField2D tpes_jsa_degenerate(const ComplexField2D& jsa, const InterferometerConfig& cfg);

// Multiply by cos(Ω₊τ_F/2); the Franson stage alone.
ComplexField2D apply_franson(const ComplexField2D& field, double tau_F);

// (1/16)|f(s,i) - f(i,s) e^{-iΩ₋τ_H}|^2
RealField2D satellite_jsi(const ComplexField2D& jsa, double tau_H);
// (1/8)|f|^2 [1 - cos(Ω₋τ_H)]
RealField2D satellite_jsi_degenerate(const ComplexField2D& jsa, double tau_H);

double coincidence_probability(const RealField2D& jsi);

// P(τ_F) = ∫∫ |field|^2 cos^2(Ω₊τ_F/2) for each τ_F, where field already
// carries the HOM stage (e.g. a bin cut out of tpes_jsa at τ_F = 0).
std::vector<double> franson_probabilities(const ComplexField2D& field,
                                          const std::vector<double>& tau_F_values);

// Delay scans sweep τ_F; pump scans sweep the pump offset δ (rad/s) at fixed
// τ_F, rebuilding the JSA with both photon centres and both grid centres
// moved by δ/2.
FringeScan fringe_scan(const SpdcParams& jsa_params, const InterferometerConfig& cfg,
                       const std::vector<double>& scan, const GridSpec& grid = {});

}  // namespace hfeq
