#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "hfeq/errors.hpp"
#include "hfeq/jsa.hpp"
#include "hfeq/units.hpp"

using namespace hfeq;

namespace {

SpdcParams degenerate(double ds, double dp, double centre = 0.0) {
  SpdcParams p;
  p.omega_s0 = p.omega_i0 = centre;
  p.single_photon_fwhm = ds;
  p.pump_fwhm = dp;
  return p;
}

std::size_t argmax(const ComplexField2D& f) {
  std::size_t best = 0;
  for (std::size_t k = 0; k < f.values().size(); ++k)
    if (std::abs(f.values()[k]) > std::abs(f.values()[best])) best = k;
  return best;
}

}  // namespace

TEST_SUITE("jsa-models") {

TEST_CASE("gaussian peak sits at the central frequencies") {
  SpdcParams p = degenerate(1.0, 0.2);
  p.omega_s0 = 0.5;
  p.omega_i0 = -0.5;
  // Sample the two centres exactly: spacing 0.01, both centres on the lattice.
  const auto g = make_grid(0.0, 8.0, 801);
  const auto f = gaussian_jsa(p, g, g);
  const std::size_t k = argmax(f);
  CHECK(g.at(k / 801) == doctest::Approx(0.5));
  CHECK(g.at(k % 801) == doctest::Approx(-0.5));
}

TEST_CASE("degenerate gaussian is exchange symmetric") {
  const auto p = degenerate(1.0, 0.05);
  const auto g = default_grid(p, {300, 0});
  const auto f = gaussian_jsa(p, g, g);
  double worst = 0.0;
  for (std::size_t s = 0; s < 300; ++s)
    for (std::size_t i = 0; i < 300; ++i) worst = std::max(worst, std::abs(f(s, i) - f(i, s)));
  CHECK(worst <= 1e-12);
}

TEST_CASE("intensity FWHM along the difference axis equals the single-photon bandwidth") {
  const auto p = degenerate(1.0, 0.3);
  const auto g = make_grid(0.0, 6.0, 1201);
  const auto f = gaussian_jsa(p, g, g);
  // Anti-diagonal through the centre: ω₊ = 0, ω₋ = 2 x.
  std::vector<double> wm, y;
  for (std::size_t s = 0; s < 1201; ++s) {
    wm.push_back(2.0 * g.at(s));
    y.push_back(std::norm(f(s, 1200 - s)));
  }
  CHECK(fwhm_of(wm, y) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("gaussian is non-negative and real, sinc changes sign") {
  const auto p = degenerate(1.0, 0.1);
  const auto g = default_grid(p, {200, 0});
  const auto f = gaussian_jsa(p, g, g);
  bool positive = true;
  for (auto v : f.values()) positive = positive && v.real() >= 0.0 && v.imag() == 0.0;  // far corners underflow to 0
  CHECK(positive);

  SpdcParams q = p;
  q.model = JsaModel::sinc;
  const auto gs = default_grid(q, {801, 0});
  const auto h = sinc_jsa(q, gs, gs);
  bool neg = false;
  for (auto v : h.values()) neg = neg || v.real() < 0.0;
  CHECK(neg);
}

TEST_CASE("sinc ridge maximum and first zeros") {
  SpdcParams p = degenerate(1.0, 0.5);
  p.model = JsaModel::sinc;
  const auto g = default_grid(p, {1001, 0});
  const auto f = sinc_jsa(p, g, g);
  const double h = g.spacing();
  // Along each anti-diagonal s + i = m (fixed ω₊) the maximum is at ω₋ = 0.
  for (std::size_t m : {980u, 1000u, 1020u}) {
    const std::size_t lo = m > 1000 ? m - 1000 : 0, hi = std::min<std::size_t>(m, 1000);
    std::size_t best = lo;
    for (std::size_t s = lo; s <= hi; ++s)
      if (std::abs(f(s, m - s)) > std::abs(f(best, m - best))) best = s;
    CHECK(best == m / 2);
  }
  // Along ω₊ = 0 (i = 1000 - s) the first zero is at ω₋ = π Δω_S.
  std::size_t zero = 500;
  while (zero < 1000 && f(zero, 1000 - zero).real() > 0.0) ++zero;
  const double wm = g.at(zero) - g.at(1000 - zero);
  CHECK(std::abs(wm - units::pi) <= 2.0 * h);
}

TEST_CASE("sinc marginal shows sidebands for a narrow pump") {
  SpdcParams p = degenerate(1.0, 0.05);
  p.model = JsaModel::sinc;
  const auto g = default_grid(p, {2048, 0});
  const auto m = marginal_spectrum(intensity(sinc_jsa(p, g, g)), Axis::signal);
  // Marginal ≈ sinc²(2δ/Δω_S); first sideband near δ = 1.43·π/2.
  double peak = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) peak = std::max(peak, m[k]);
  double side = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double d = std::abs(g.at(k));
    if (d > 0.5 * units::pi * 1.1 && d < units::pi * 0.95) side = std::max(side, m[k]);
  }
  CHECK(side >= 0.04 * peak);
}

TEST_CASE("relabeling frequencies leaves samples unchanged") {
  for (auto model : {JsaModel::gaussian, JsaModel::sinc}) {
    SpdcParams p = degenerate(1.0, 0.1, 3.0);
    p.omega_i0 = 2.5;
    p.model = model;
    const auto g = default_grid(p, {256, 0});
    const auto f = make_jsa(p, g, g);
    SpdcParams q = p;
    const double shift = 7.25;
    q.omega_s0 += shift;
    q.omega_i0 += shift;
    const auto g2 = make_grid(g.center() + shift, g.span(), g.n_points());
    const auto f2 = make_jsa(q, g2, g2);
    double worst = 0.0;
    for (std::size_t k = 0; k < f.values().size(); ++k) worst = std::max(worst, std::abs(f.values()[k] - f2.values()[k]));
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("non-degenerate JSA is asymmetric") {
  SpdcParams p = degenerate(1.0, 0.1);
  p.omega_s0 = 1.0;
  p.omega_i0 = -1.0;
  const auto g = default_grid(p, {200, 0});
  const auto f = gaussian_jsa(p, g, g);
  double worst = 0.0;
  for (std::size_t s = 0; s < 200; ++s)
    for (std::size_t i = 0; i < 200; ++i) worst = std::max(worst, std::abs(f(s, i) - f(i, s)));
  CHECK(worst > 1e-3);
}

TEST_CASE("too-narrow grid raises a truncation error") {
  const auto p = degenerate(1.0, 0.05);
  const auto g = make_grid(0.0, 0.6, 128);
  CHECK_THROWS_AS(gaussian_jsa(p, g, g), TruncationError);
  SpdcParams q = p;
  q.model = JsaModel::sinc;
  const auto gs = default_grid(q, {512, 4.0});
  CHECK_THROWS_AS(sinc_jsa(q, gs, gs), TruncationError);
}

TEST_CASE("invalid parameters") {
  auto p = degenerate(1.0, 0.0);
  const auto g = make_grid(0.0, 10.0, 64);
  CHECK_THROWS_AS(gaussian_jsa(p, g, g), InvalidArgument);
  p = degenerate(-1.0, 0.1);
  CHECK_THROWS_AS(gaussian_jsa(p, g, g), InvalidArgument);
  p = degenerate(1.0, 0.1, 50.0);
  CHECK_THROWS_AS(gaussian_jsa(p, g, g), InvalidArgument);
}

TEST_CASE("sine integral reference values") {
  CHECK(sine_integral(1.0) == doctest::Approx(0.9460830703671830).epsilon(1e-10));
  CHECK(sine_integral(10.0) == doctest::Approx(1.658347594218874).epsilon(1e-10));
  CHECK(sine_integral(-2.0) == doctest::Approx(-1.605412976802695).epsilon(1e-10));
}

}
