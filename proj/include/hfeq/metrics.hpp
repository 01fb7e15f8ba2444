#pragma once

#include <optional>
#include <vector>

#include "hfeq/spectral.hpp"

namespace hfeq {

struct SchmidtResult {
  std::vector<double> coefficients;  // λ_n, descending, sum 1
  double schmidt_number = 1.0;       // 1 / Σ λ_n^2
  int sweeps = 0;
  std::size_t rank = 0;
};

struct BinDecomposition {
  std::vector<double> bin_centers;  // rad/s, index k = -(D-1)/2 ... (D-1)/2
  std::vector<double> bin_weights;  // normalized over the D bins
  double window_half_width = 0.0;   // rad/s
  int dimension = 0;                // D, odd
  double center = 0.0;              // lattice origin Ω_0
  std::vector<double> lattice_weights;  // raw window integrals for every lattice point on the grid
  int lattice_min_index = 0;            // k of lattice_weights[0]
};

struct DimensionOptions {
  double threshold = 0.05;        // fraction of the largest bin weight
  double window_fraction = 0.25;  // half-width in units of the bin spacing π/τ_H
  std::optional<double> center;   // lattice origin; spectral centroid if unset
};

struct KfOptions {
  double ratio_max = 1.0;    // Δω_p/Δω_S ladder end points
  double ratio_min = 0.01;
  std::size_t ladder_points = 25;
  std::size_t spectrum_points = 1024;  // 2D grid for V_H
  std::size_t schmidt_points = 512;    // 2D grid for K_F
  double extent = 1.5;                 // grid half-width in Δω_S
};

struct KfCurvePoint {
  double pump_ratio = 0.0;
  double visibility = 0.0;
  double schmidt_number = 0.0;
};

struct KfEstimate {
  double kf = 0.0;            // lower bound on K_F
  double pump_ratio = 0.0;    // ladder point that produced it
  bool saturated = false;     // v_h at or beyond the curve maximum
  std::vector<KfCurvePoint> curve;
};

Spectrum1D single_mode_spectrum(const RealField2D& jsi);

// Extremes of spec/reference over the region where reference >= 1% of its peak.
double hom_visibility(const Spectrum1D& spec, const Spectrum1D& reference);

SchmidtResult schmidt_number(const ComplexField2D& jsa);

BinDecomposition estimate_dimension(const Spectrum1D& spec, double tau_H,
                                    const DimensionOptions& opt = {});

// Signal-axis window with raised-cosine edges one grid spacing wide; n runs
// from -(D-1)/2 to (D-1)/2.
ComplexField2D extract_bin(const ComplexField2D& jsa, const BinDecomposition& decomp, int n);

// Generates the (V_H, K_F) curve for degenerate Gaussian combs over a
// log-spaced Δω_p ladder, blurs each marginal by the jitter, and returns the
// largest K_F whose V_H does not exceed v_h.
KfEstimate kf_from_visibility(double v_h, double tau_H, double jitter_fwhm,
                              double delta_omega_S, const KfOptions& opt = {});

// Inversion step of kf_from_visibility on a precomputed curve.
KfEstimate invert_kf_curve(const std::vector<KfCurvePoint>& curve, double v_h);

std::vector<KfCurvePoint> kf_curve(double tau_H, double jitter_fwhm, double delta_omega_S,
                                   const KfOptions& opt = {});

}  // namespace hfeq
