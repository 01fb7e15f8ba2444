#include <cmath>
#include <complex>

#include "doctest.h"
#include "hfeq/errors.hpp"
#include "hfeq/fits.hpp"
#include "hfeq/interferometer.hpp"
#include "hfeq/jsa.hpp"
#include "hfeq/metrics.hpp"
#include "hfeq/units.hpp"
#include "oracles.hpp"

using namespace hfeq;

namespace {

const double kDsPhys = units::ghz_to_angular(300.0);

SpdcParams degenerate(double ds, double dp, double centre = 0.0) {
  SpdcParams p;
  p.omega_s0 = p.omega_i0 = centre;
  p.single_photon_fwhm = ds;
  p.pump_fwhm = dp;
  return p;
}

struct Comb {
  FrequencyGrid grid;
  ComplexField2D jsa;
  ComplexField2D tpes;
  Spectrum1D spectrum;
  Spectrum1D reference;
};

Comb make_comb(double ds, double dp, double tau_h, std::size_t n, double extent = 4.0) {
  Comb c;
  const auto p = degenerate(ds, dp);
  c.grid = default_grid(p, {n, extent});
  c.jsa = gaussian_jsa(p, c.grid, c.grid);
  InterferometerConfig cfg;
  cfg.tau_H = tau_h;
  c.tpes = tpes_jsa(c.jsa, cfg);
  c.spectrum = single_mode_spectrum(intensity(c.tpes));
  c.reference = single_mode_spectrum(intensity(c.jsa));
  return c;
}

int count_local_maxima(const Spectrum1D& s, double rel) {
  double peak = 0.0;
  for (double v : s.values()) peak = std::max(peak, v);
  int n = 0;
  for (std::size_t k = 1; k + 1 < s.size(); ++k)
    if (s[k] > s[k - 1] && s[k] >= s[k + 1] && s[k] > rel * peak) ++n;
  return n;
}

}  // namespace

TEST_SUITE("entanglement-metrics") {

TEST_CASE("τ_H = 0 spectrum is a single smooth lobe") {
  const auto c = make_comb(1.0, 0.05, 0.0, 512);
  CHECK(count_local_maxima(c.spectrum, 1e-6) == 1);
}

TEST_CASE("τ_H = 12/Δω_S comb shows five dominant peaks") {
  const auto c = make_comb(1.0, 0.05, 12.0, 512);
  CHECK(count_local_maxima(c.spectrum, 0.05) == 5);
  CHECK(estimate_dimension(c.spectrum, 12.0).dimension == 5);
}

TEST_CASE("comb peak spacing is 1/(2τ_H)") {
  const double tau = 13.8e-12;
  const auto c = make_comb(kDsPhys, kDsPhys / 20.0, tau, 512);
  std::vector<double> peaks;
  const auto& s = c.spectrum;
  double top = 0.0;
  for (double v : s.values()) top = std::max(top, v);
  for (std::size_t k = 1; k + 1 < s.size(); ++k)
    if (s[k] > s[k - 1] && s[k] >= s[k + 1] && s[k] > 0.2 * top) {
      // parabolic refinement
      const double d = 0.5 * (s[k - 1] - s[k + 1]) / (s[k - 1] - 2 * s[k] + s[k + 1]);
      peaks.push_back(c.grid.at(k) + d * c.grid.spacing());
    }
  REQUIRE(peaks.size() >= 3);
  const double mean = (peaks.back() - peaks.front()) / (peaks.size() - 1);
  CHECK(mean / units::two_pi == doctest::Approx(1.0 / (2.0 * tau)).epsilon(0.02));
}

TEST_CASE("hom_visibility of the reference itself is zero") {
  const auto c = make_comb(1.0, 0.05, 12.0, 256);
  CHECK(std::abs(hom_visibility(c.reference, c.reference)) <= 1e-10);
}

TEST_CASE("narrow-pump comb has unit contrast") {
  const auto p = degenerate(1.0, 1e-3);
  const auto g = make_grid(0.0, 4.0, 1024);
  const auto f = gaussian_jsa(p, g, g);
  InterferometerConfig cfg;
  cfg.tau_H = 12.0;
  const auto s = single_mode_spectrum(intensity(tpes_jsa(f, cfg)));
  const auto r = single_mode_spectrum(intensity(f));
  CHECK(hom_visibility(s, r) >= 0.999);
}

TEST_CASE("jitter-blurred comb visibility at 16.5 ps") {
  const double tau = 16.5e-12;
  const double jit = units::ghz_to_angular(4.0);
  const auto p = degenerate(kDsPhys, kDsPhys / 1000.0);
  const auto g = make_grid(0.0, 3.0 * kDsPhys, 1024);
  const auto f = gaussian_jsa(p, g, g);
  InterferometerConfig cfg;
  cfg.tau_H = tau;
  const auto s = convolve_gaussian(single_mode_spectrum(intensity(tpes_jsa(f, cfg))), jit);
  const auto r = convolve_gaussian(single_mode_spectrum(intensity(f)), jit);
  CHECK(hom_visibility(s, r) == doctest::Approx(0.94).epsilon(0.01 / 0.94));
  CHECK(hom_visibility(s, r) == doctest::Approx(oracle::jitter_attenuation(jit, tau)).epsilon(0.005));
}

TEST_CASE("hom_visibility input guards") {
  const auto g = make_grid(0.0, 1.0, 11);
  const auto g2 = make_grid(0.0, 1.0, 12);
  CHECK_THROWS_AS(hom_visibility(Spectrum1D(g, std::vector<double>(11, 1.0)), Spectrum1D(g2, std::vector<double>(12, 1.0))),
                  InvalidArgument);
  CHECK_THROWS_AS(hom_visibility(Spectrum1D(g, std::vector<double>(11, 1.0)), Spectrum1D(g, std::vector<double>(11, 0.0))),
                  InvalidArgument);
}

TEST_CASE("Schmidt number of a separable Gaussian") {
  const auto p = degenerate(1.0, 1.0);
  const auto g = default_grid(p, {256, 0});
  const auto r = schmidt_number(gaussian_jsa(p, g, g));
  CHECK(r.schmidt_number == doctest::Approx(1.0).epsilon(0.01));
  CHECK(r.coefficients.front() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Schmidt number of the double Gaussian matches the closed form") {
  const auto p = degenerate(1.0, 0.05);
  const auto g = default_grid(p, {512, 0});
  const auto f = gaussian_jsa(p, g, g);
  const auto r = schmidt_number(f);
  CHECK(r.schmidt_number == doctest::Approx(10.025).epsilon(0.01));
  CHECK(r.schmidt_number == doctest::Approx(oracle::gram_schmidt_number(f)).epsilon(1e-8));
  double sum = 0.0;
  for (double l : r.coefficients) sum += l;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
  for (std::size_t k = 1; k < r.coefficients.size(); ++k) CHECK(r.coefficients[k] <= r.coefficients[k - 1]);
}

TEST_CASE("HOM comb Schmidt number at τ_H = 16/Δω_S") {
  // Frozen from the grid SVD and the Gram-trace oracle (K = 7.2056 at 1024², ±4Δω_S).
  const auto c = make_comb(1.0, 0.05, 16.0, 512);
  const double k = schmidt_number(c.tpes).schmidt_number;
  CHECK(k == doctest::Approx(7.2056).epsilon(0.01));
  CHECK(k == doctest::Approx(oracle::gram_schmidt_number(c.tpes)).epsilon(1e-8));
}

TEST_CASE("Schmidt number invariances") {
  const auto c = make_comb(1.0, 0.1, 10.0, 200);
  const double k = schmidt_number(c.tpes).schmidt_number;
  ComplexField2D scaled = c.tpes;
  for (auto& v : scaled.values()) v *= std::complex<double>(-3.0, 1.5);
  CHECK(schmidt_number(scaled).schmidt_number == doctest::Approx(k).epsilon(1e-8));
  ComplexField2D t = c.tpes;
  for (std::size_t s = 0; s < 200; ++s)
    for (std::size_t i = 0; i < 200; ++i) t(s, i) = c.tpes(i, s);
  CHECK(schmidt_number(t).schmidt_number == doctest::Approx(k).epsilon(1e-8));
}

TEST_CASE("Schmidt number grows as the pump narrows") {
  double last = 0.0;
  for (double r : {0.5, 0.2, 0.1, 0.07, 0.05}) {
    const double k = schmidt_number(make_comb(1.0, r, 12.0, 256).tpes).schmidt_number;
    CHECK(k >= last);
    last = k;
  }
}

TEST_CASE("Schmidt number input guards") {
  const auto p = degenerate(1.0, 0.5);
  const auto g = default_grid(p, {64, 0});
  const auto g2 = make_grid(0.0, g.span(), 65);
  CHECK_THROWS_AS(schmidt_number(gaussian_jsa(p, g, g2)), InvalidArgument);
  ComplexField2D z(g, g);
  CHECK_THROWS_AS(schmidt_number(z), InvalidArgument);
}

TEST_CASE("dimension at τ_H = 20/Δω_S is 7") {
  const auto c = make_comb(1.0, 0.05, 20.0, 512);
  const auto d = estimate_dimension(c.spectrum, 20.0);
  CHECK(d.dimension == 7);
  CHECK(d.bin_centers.size() == 7);
  double sum = 0.0;
  for (double w : d.bin_weights) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(0.02));
  for (std::size_t k = 0; k < 7; ++k)
    CHECK(std::abs(d.bin_centers[k] + d.bin_centers[6 - k]) <= c.grid.spacing());
}

TEST_CASE("dimension at τ_H = 6.14 ps and 300 GHz") {
  const double tau = 6.14e-12;
  const auto c = make_comb(kDsPhys, kDsPhys / 20.0, tau, 512);
  const auto d = estimate_dimension(c.spectrum, tau);
  const double spacing_ghz = units::angular_to_ghz(d.bin_centers[1] - d.bin_centers[0]);
  CHECK(spacing_ghz == doctest::Approx(81.43).epsilon(0.001));
  // The ±2 bins carry 3.96% of the central weight, under the 5% threshold.
  CHECK(d.dimension == 3);
}

TEST_CASE("dimension grows weakly with τ_H") {
  int last = 0;
  for (double tau : {4.0, 8.0, 12.0, 16.0, 20.0}) {
    const auto c = make_comb(1.0, 0.05, tau, 512);
    const int d = estimate_dimension(c.spectrum, tau).dimension;
    CHECK(d % 2 == 1);
    CHECK(d >= last);
    last = d;
  }
}

TEST_CASE("estimate_dimension errors") {
  const auto g = make_grid(0.0, 10.0, 101);
  const Spectrum1D zero(g, std::vector<double>(101, 0.0));
  CHECK_THROWS_AS(estimate_dimension(zero, 1.0), DegenerateInput);
  CHECK_THROWS_AS(estimate_dimension(Spectrum1D(g, std::vector<double>(101, 1.0)), 0.0), InvalidArgument);
}

TEST_CASE("central bin of the comb stays entangled") {
  const auto c = make_comb(1.0, 0.05, 12.0, 512);
  const auto d = estimate_dimension(c.spectrum, 12.0);
  CHECK(schmidt_number(extract_bin(c.tpes, d, 0)).schmidt_number > 1.5);
  CHECK_THROWS_AS(extract_bin(c.tpes, d, 3), OutOfRange);
  CHECK_THROWS_AS(extract_bin(c.tpes, d, -3), OutOfRange);
}

TEST_CASE("bins with half-spacing windows re-assemble the marginal") {
  const auto c = make_comb(1.0, 0.05, 12.0, 512);
  DimensionOptions opt;
  opt.window_fraction = 0.5;
  const auto d = estimate_dimension(c.spectrum, 12.0, opt);
  const int half = (d.dimension - 1) / 2;
  std::vector<double> sum(c.spectrum.size(), 0.0);
  for (int n = -half; n <= half; ++n) {
    const auto m = single_mode_spectrum(intensity(extract_bin(c.tpes, d, n)));
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += m[k];
  }
  double l1 = 0.0, norm = 0.0;
  for (std::size_t k = 0; k < sum.size(); ++k) {
    l1 += std::abs(sum[k] - c.spectrum[k]);
    norm += c.spectrum[k];
  }
  CHECK(l1 / norm <= 0.02);
}

TEST_CASE("per-bin Franson fringes are in phase") {
  const double centre = 10.0;
  const auto p = degenerate(1.0, 0.05, centre);
  const auto g = default_grid(p, {384, 0});
  const auto f = gaussian_jsa(p, g, g);
  InterferometerConfig cfg;
  cfg.tau_H = 12.0;
  const auto hom = tpes_jsa(f, cfg);
  const auto d = estimate_dimension(single_mode_spectrum(intensity(hom)), cfg.tau_H, {0.05, 0.25, centre});
  REQUIRE(d.dimension == 5);
  const double period = 2.0 * units::pi / p.pump();
  std::vector<double> taus;
  for (int k = 0; k <= 40; ++k) taus.push_back(10.0 + 3.0 * period * k / 40.0);
  std::vector<double> phases;
  for (int n = -2; n <= 2; ++n) {
    FringeScan fs;
    fs.scan_values = taus;
    fs.probabilities = franson_probabilities(extract_bin(hom, d, n), taus);
    fs.nominal_phase_rate = p.pump();
    phases.push_back(fit_fringe(fs).value("phi0"));
  }
  for (double ph : phases) CHECK(std::abs(std::remainder(ph - phases[2], 2 * units::pi)) <= 0.05);
}

TEST_CASE("K_F lower bound from the measured HOM visibility") {
  const double tau = 6.14e-12;
  const double jit = units::ghz_to_angular(4.0);
  const auto curve = kf_curve(tau, jit, kDsPhys);
  for (std::size_t k = 1; k < curve.size(); ++k) CHECK(curve[k].schmidt_number >= curve[k - 1].schmidt_number);

  const auto est = invert_kf_curve(curve, 0.972);
  CHECK(est.kf >= 6.0);
  CHECK(est.kf <= 8.5);
  CHECK_FALSE(est.saturated);

  double vmax = 0.0, vmin = 1.0, kmax = 0.0;
  for (const auto& c : curve) {
    vmax = std::max(vmax, c.visibility);
    vmin = std::min(vmin, c.visibility);
    kmax = std::max(kmax, c.schmidt_number);
  }
  const auto top = invert_kf_curve(curve, vmax);
  CHECK(top.saturated);
  CHECK(top.kf == kmax);

  double last = 0.0;
  for (double v = vmin; v <= vmax; v += (vmax - vmin) / 50.0) {
    const double k = invert_kf_curve(curve, v).kf;
    CHECK(k >= last);
    last = k;
  }
  CHECK_THROWS_AS(invert_kf_curve(curve, 0.5 * vmin), OutOfRange);
  CHECK_THROWS_AS(invert_kf_curve(curve, 1.5), InvalidArgument);
}

}
