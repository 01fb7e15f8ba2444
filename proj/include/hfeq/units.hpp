#pragma once

#include <numbers>

// Internal units: rad/s and seconds. The helpers below are the only place
// where GHz, nm and ps enter.
namespace hfeq::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double ln2 = std::numbers::ln2;
inline constexpr double speed_of_light = 299792458.0;  // m/s

inline constexpr double ps = 1e-12;
inline constexpr double ns = 1e-9;
inline constexpr double fs = 1e-15;

constexpr double ghz_to_angular(double ghz) { return two_pi * ghz * 1e9; }
constexpr double angular_to_ghz(double w) { return w / (two_pi * 1e9); }
constexpr double mhz_to_angular(double mhz) { return two_pi * mhz * 1e6; }
constexpr double angular_to_mhz(double w) { return w / (two_pi * 1e6); }

constexpr double wavelength_nm_to_angular(double nm) {
  return two_pi * speed_of_light / (nm * 1e-9);
}
constexpr double angular_to_wavelength_nm(double w) {
  return two_pi * speed_of_light / w * 1e9;
}

// Linewidth conversion dλ -> dω at wavelength λ (both in nm).
constexpr double wavelength_interval_to_angular(double dlambda_nm, double lambda_nm) {
  return two_pi * speed_of_light * dlambda_nm / (lambda_nm * lambda_nm) * 1e9;
}

}  // namespace hfeq::units
