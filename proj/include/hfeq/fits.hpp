#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hfeq/detection.hpp"
#include "hfeq/interferometer.hpp"
#include "hfeq/spectral.hpp"

namespace hfeq {

struct FitParameter {
  std::string name;
  double value = 0.0;
  std::string unit;
  double std_error = 0.0;
};

struct FitResult {
  std::vector<FitParameter> parameters;
  std::vector<double> covariance_diag;  // same order as parameters
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_history;  // |r| after each accepted step
  std::map<std::string, bool> flags;
  std::map<std::string, double> diagnostics;

  const FitParameter& get(const std::string& name) const;
  double value(const std::string& name) const { return get(name).value; }
};

// Comb envelope model:
//   S(Ω) = N0/2 · exp(-16 ln2 (Ω-c)^2/Δω_S^2) · [1 + V cos(2(Ω-c)τ_H)]
struct CombParams {
  double n0 = 1.0;
  double visibility = 1.0;
  double tau_H = 0.0;
  double delta_omega_S = 0.0;
  double center = 0.0;
};

double comb_value(double omega, const CombParams& p);
Spectrum1D comb_spectrum(const FrequencyGrid& grid, const CombParams& p);

struct CombFitOptions {
  int max_iterations = 200;
  int min_teeth = 3;
};

// Count data with edges in rad/s; Poisson weights 1/max(count, 1). Each bin's
// model is the bin integral divided by the mean bin width.
FitResult fit_comb(const CountHistogram& hist, const CombFitOptions& opt = {});
// Noiseless model scan; unweighted, evaluated pointwise.
FitResult fit_comb(const Spectrum1D& spec, const CombFitOptions& opt = {});

struct FringeFitOptions {
  double background = 0.0;             // B, held fixed
  std::optional<double> phase_rate;    // seed for k; periodogram when unset
  bool fit_rate = true;
  int max_iterations = 200;
};

// C(x) = B + A[1 + V cos(k (x - x_ref) + φ0)], x_ref = centre of the scan.
FitResult fit_fringe(const FringeScan& scan, const FringeFitOptions& opt = {});
// Counts binned over the scan variable (phase, delay or pump offset).
FitResult fit_fringe(const CountHistogram& hist, const FringeFitOptions& opt = {});
FitResult fit_fringe(const RealHistogram& hist, const FringeFitOptions& opt = {});

// Points are (wavelength nm, arrival time ns).
FitResult fit_linear_calibration(const std::vector<std::pair<double, double>>& points);

}  // namespace hfeq
