#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hfeq/errors.hpp"
#include "hfeq/jsa.hpp"
#include "hfeq/spectral.hpp"
#include "hfeq/units.hpp"
#include "oracles.hpp"

using namespace hfeq;

TEST_SUITE("spectral-core") {

TEST_CASE("make_grid samples and spacing") {
  const auto g = make_grid(0.0, 10.0, 11);
  CHECK(g.spacing() == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t k = 0; k < 11; ++k) CHECK(g.at(k) == doctest::Approx(-5.0 + k).epsilon(1e-15));
  CHECK(g.at(0) == -5.0);
  CHECK(g.at(10) == 5.0);
}

TEST_CASE("make_grid rejects bad input") {
  CHECK_THROWS_AS(make_grid(100.0, 0.0, 5), InvalidArgument);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 1), InvalidArgument);
  CHECK_THROWS_AS(make_grid(NAN, 1.0, 5), InvalidArgument);
  CHECK_THROWS_AS(make_grid(0.0, INFINITY, 5), InvalidArgument);
}

TEST_CASE("make_grid spacing definition at THz scale") {
  const double span = units::two_pi * 3.2e12;
  const auto g = make_grid(0.0, span, 1024);
  CHECK(g.spacing() == span / 1023.0);
  CHECK(std::abs(g.spacing() * 1023.0 - span) <= 1e-12 * span);
  auto x = g.samples();
  for (std::size_t k = 1; k < x.size(); ++k) CHECK(x[k] > x[k - 1]);
}

TEST_CASE("grid stays strictly increasing at optical centre") {
  const auto g = make_grid(units::wavelength_nm_to_angular(1550.0), units::ghz_to_angular(2400.0), 4096);
  auto x = g.samples();
  bool increasing = true;
  for (std::size_t k = 1; k < x.size(); ++k) increasing = increasing && x[k] > x[k - 1];
  CHECK(increasing);
}

TEST_CASE("integrate_2d of a unit box") {
  const auto g = make_grid(0.5, 1.0, 17);
  RealField2D f(g, g, std::vector<double>(17 * 17, 1.0));
  CHECK(integrate_2d(f) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("normalized JSI integrates to one") {
  SpdcParams p;
  p.single_photon_fwhm = 1.0;
  p.pump_fwhm = 0.3;
  const auto g = default_grid(p, {256, 0});
  const auto f = gaussian_jsa(p, g, g);
  CHECK(integrate_2d(intensity(f)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("half-masked symmetric field integrates to half") {
  SpdcParams p;
  p.single_photon_fwhm = 1.0;
  p.pump_fwhm = 0.5;
  // Odd grid puts the mask line on samples; trapezoid counts it half.
  const auto g = default_grid(p, {257, 0});
  const auto jsi = intensity(gaussian_jsa(p, g, g));
  RealField2D masked = jsi;
  for (std::size_t s = 0; s < g.n_points(); ++s)
    for (std::size_t i = 0; i < g.n_points(); ++i) {
      if (s > i) masked(s, i) = 0.0;
      if (s == i) masked(s, i) *= 0.5;
    }
  CHECK(integrate_2d(masked) == doctest::Approx(0.5 * integrate_2d(jsi)).epsilon(1e-6));
}

TEST_CASE("marginal of a separable field") {
  const auto gs = make_grid(0.0, 8.0, 201);
  const auto gi = make_grid(1.0, 6.0, 151);
  RealField2D f(gs, gi);
  double hint = 0.0;
  for (std::size_t i = 0; i < gi.n_points(); ++i) hint += gi.weight(i) * (1.0 + 0.5 * std::sin(gi.at(i)));
  for (std::size_t s = 0; s < gs.n_points(); ++s)
    for (std::size_t i = 0; i < gi.n_points(); ++i)
      f(s, i) = std::exp(-gs.at(s) * gs.at(s)) * (1.0 + 0.5 * std::sin(gi.at(i)));
  const auto m = marginal_spectrum(f, Axis::signal);
  for (std::size_t s = 0; s < gs.n_points(); ++s)
    CHECK(m[s] == doctest::Approx(std::exp(-gs.at(s) * gs.at(s)) * hint).epsilon(1e-8));
}

TEST_CASE("CW-limit marginal FWHM is half the single-photon bandwidth") {
  SpdcParams p;
  p.single_photon_fwhm = 1.0;
  p.pump_fwhm = 1e-3;
  // Pump narrower than the spacing: only the ω₊ = 0 anti-diagonal survives.
  const auto g = make_grid(0.0, 4.0, 2001);
  const auto m = marginal_spectrum(intensity(gaussian_jsa(p, g, g)), Axis::signal);
  const auto x = g.samples();
  CHECK(fwhm_of(x, m.values()) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("symmetric JSI has identical marginals") {
  SpdcParams p;
  p.single_photon_fwhm = 1.0;
  p.pump_fwhm = 0.1;
  const auto g = default_grid(p, {300, 0});
  const auto jsi = intensity(gaussian_jsa(p, g, g));
  const auto ms = marginal_spectrum(jsi, Axis::signal);
  const auto mi = marginal_spectrum(jsi, Axis::idler);
  double worst = 0.0, peak = 0.0;
  for (std::size_t k = 0; k < ms.size(); ++k) {
    worst = std::max(worst, std::abs(ms[k] - mi[k]));
    peak = std::max(peak, ms[k]);
  }
  CHECK(worst <= 1e-10 * peak);
}

TEST_CASE("convolve_gaussian with zero width is the identity") {
  const auto g = make_grid(0.0, 10.0, 101);
  std::vector<double> v(101);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = 1.0 + std::sin(0.3 * k);
  const Spectrum1D s(g, v);
  CHECK(convolve_gaussian(s, 0.0).values() == v);
}

TEST_CASE("convolve_gaussian of a spike") {
  const auto g = make_grid(0.0, 100.0, 2001);
  std::vector<double> v(2001, 0.0);
  v[1000] = 1.0 / g.spacing();
  const Spectrum1D spike(g, v);
  const double fwhm = 3.0;
  const auto out = convolve_gaussian(spike, fwhm);
  CHECK(integrate_1d(out) == doctest::Approx(1.0).epsilon(1e-4));
  const auto x = g.samples();
  CHECK(fwhm_of(x, out.values()) == doctest::Approx(fwhm).epsilon(2e-3));
}

TEST_CASE("convolve_gaussian enforces the resolution guard") {
  const auto g = make_grid(0.0, 10.0, 11);
  const Spectrum1D s(g, std::vector<double>(11, 1.0));
  CHECK_THROWS_AS(convolve_gaussian(s, 3.0), ResolutionError);
  CHECK_THROWS_AS(convolve_gaussian(s, -1.0), InvalidArgument);
}

TEST_CASE("jitter blur attenuates a comb by the analytic factor") {
  const double tau = 16.5e-12;
  const double dw = units::ghz_to_angular(4.0);
  const double span = units::ghz_to_angular(600.0);
  const auto g = make_grid(0.0, span, 8193);
  std::vector<double> v(g.n_points());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = 1.0 + std::cos(2.0 * g.at(k) * tau);
  const auto out = convolve_gaussian(Spectrum1D(g, v), dw);
  // Contrast of the interior, away from the zero-padded edges.
  double hi = 0.0, lo = 1e300;
  for (std::size_t k = 2000; k < 6193; ++k) {
    hi = std::max(hi, out[k]);
    lo = std::min(lo, out[k]);
  }
  const double vis = (hi - lo) / (hi + lo);
  const double expected = oracle::jitter_attenuation(dw, tau);
  CHECK(expected == doctest::Approx(0.940).epsilon(0.005 / 0.94));
  CHECK(vis == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("convolve_gaussian is linear") {
  const auto g = make_grid(0.0, 40.0, 801);
  std::vector<double> a(801), b(801), ab(801);
  for (std::size_t k = 0; k < 801; ++k) {
    a[k] = std::exp(-0.1 * (g.at(k) - 3) * (g.at(k) - 3));
    b[k] = 1.0 + std::cos(g.at(k));
    ab[k] = 2.5 * a[k] + 0.75 * b[k];
  }
  const double fwhm = 1.7;
  const auto ca = convolve_gaussian(Spectrum1D(g, a), fwhm);
  const auto cb = convolve_gaussian(Spectrum1D(g, b), fwhm);
  const auto cab = convolve_gaussian(Spectrum1D(g, ab), fwhm);
  for (std::size_t k = 0; k < 801; ++k) CHECK(std::abs(cab[k] - (2.5 * ca[k] + 0.75 * cb[k])) <= 1e-10);
}

TEST_CASE("convolution preserves the integral of a contained spectrum") {
  const auto g = make_grid(0.0, 60.0, 1201);
  std::vector<double> v(1201);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::exp(-0.5 * g.at(k) * g.at(k) / 4.0) * (1.2 + std::cos(3 * g.at(k)));
  const Spectrum1D s(g, v);
  CHECK(integrate_1d(convolve_gaussian(s, 1.0)) == doctest::Approx(integrate_1d(s)).epsilon(1e-6));
}

TEST_CASE("quadrature converges under grid doubling") {
  SpdcParams p;
  p.single_photon_fwhm = 1.0;
  p.pump_fwhm = 0.4;
  const auto g1 = default_grid(p, {256, 4.0});
  const auto g2 = default_grid(p, {512, 4.0});
  // Unnormalized Gaussian so the normalization does not hide the rule's error.
  auto raw = [&](const FrequencyGrid& g) {
    RealField2D f(g, g);
    for (std::size_t s = 0; s < g.n_points(); ++s)
      for (std::size_t i = 0; i < g.n_points(); ++i) {
        const double wm = g.at(s) - g.at(i), wp = g.at(s) + g.at(i);
        f(s, i) = std::exp(-4 * units::ln2 * (wm * wm + wp * wp / 0.16));
      }
    return integrate_2d(f);
  };
  const double a = raw(g1), b = raw(g2);
  CHECK(std::abs(a - b) <= 1e-6 * std::abs(b));
}

TEST_CASE("marginal then 1D integral equals the 2D integral") {
  SpdcParams p;
  p.single_photon_fwhm = 1.0;
  p.pump_fwhm = 0.2;
  p.omega_s0 = 0.3;
  p.omega_i0 = -0.2;
  const auto g = default_grid(p, {200, 0});
  const auto jsi = intensity(gaussian_jsa(p, g, g));
  const double total = integrate_2d(jsi);
  CHECK(integrate_1d(marginal_spectrum(jsi, Axis::signal)) == doctest::Approx(total).epsilon(1e-8));
  CHECK(integrate_1d(marginal_spectrum(jsi, Axis::idler)) == doctest::Approx(total).epsilon(1e-8));
}

TEST_CASE("CumulativeIntegral matches trapezoid totals") {
  const auto g = make_grid(0.0, 4.0, 41);
  std::vector<double> v(41);
  for (std::size_t k = 0; k < 41; ++k) v[k] = 2.0 + g.at(k);
  const Spectrum1D s(g, v);
  const CumulativeIntegral c(s);
  CHECK(c.between(-2.0, 2.0) == doctest::Approx(integrate_1d(s)));
  // Linear integrand: exact on any sub-interval.
  CHECK(c.between(-0.37, 1.21) == doctest::Approx((2.0 * 1.58) + 0.5 * (1.21 * 1.21 - 0.37 * 0.37)).epsilon(1e-12));
}

}
