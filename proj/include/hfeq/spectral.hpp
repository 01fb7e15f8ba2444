#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hfeq {

using cplx = std::complex<double>;

// Uniform sampling of one angular-frequency axis (rad/s).
class FrequencyGrid {
 public:
  FrequencyGrid() = default;

  double center() const { return center_; }
  double span() const { return span_; }
  std::size_t n_points() const { return n_; }
  double spacing() const { return spacing_; }
  double lo() const { return center_ - 0.5 * span_; }
  double hi() const { return center_ + 0.5 * span_; }

  // Sample k. The last sample is pinned to hi() exactly.
  double at(std::size_t k) const {
    return k + 1 == n_ ? hi() : lo() + static_cast<double>(k) * spacing_;
  }
  std::vector<double> samples() const;

  // Trapezoid weight of sample k.
  double weight(std::size_t k) const {
    return (k == 0 || k + 1 == n_) ? 0.5 * spacing_ : spacing_;
  }

  bool contains(double w) const { return w >= lo() && w <= hi(); }

  friend bool operator==(const FrequencyGrid& a, const FrequencyGrid& b) {
    return a.center_ == b.center_ && a.span_ == b.span_ && a.n_ == b.n_;
  }

 private:
  friend FrequencyGrid make_grid(double, double, std::size_t);
  double center_ = 0.0;
  double span_ = 0.0;
  double spacing_ = 0.0;
  std::size_t n_ = 0;
};

FrequencyGrid make_grid(double center, double span, std::size_t n_points);

// Row-major 2D sample storage, signal index first: values[s * n_i + i].
template <typename T>
class Field2D {
 public:
  Field2D() = default;
  Field2D(FrequencyGrid grid_s, FrequencyGrid grid_i);
  Field2D(FrequencyGrid grid_s, FrequencyGrid grid_i, std::vector<T> values);

  const FrequencyGrid& grid_s() const { return grid_s_; }
  const FrequencyGrid& grid_i() const { return grid_i_; }
  std::size_t n_s() const { return grid_s_.n_points(); }
  std::size_t n_i() const { return grid_i_.n_points(); }
  bool square() const { return grid_s_ == grid_i_; }

  T& operator()(std::size_t s, std::size_t i) { return values_[s * n_i() + i]; }
  const T& operator()(std::size_t s, std::size_t i) const { return values_[s * n_i() + i]; }

  std::span<T> row(std::size_t s) { return {values_.data() + s * n_i(), n_i()}; }
  std::span<const T> row(std::size_t s) const { return {values_.data() + s * n_i(), n_i()}; }

  std::vector<T>& values() { return values_; }
  const std::vector<T>& values() const { return values_; }

 private:
  FrequencyGrid grid_s_;
  FrequencyGrid grid_i_;
  std::vector<T> values_;
};

using ComplexField2D = Field2D<cplx>;
using RealField2D = Field2D<double>;

class Spectrum1D {
 public:
  Spectrum1D() = default;
  Spectrum1D(FrequencyGrid grid, std::vector<double> values);

  const FrequencyGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

 private:
  FrequencyGrid grid_;
  std::vector<double> values_;
};

enum class Axis { signal, idler };

double integrate_1d(const Spectrum1D& spec);
double integrate_2d(const RealField2D& field);
Spectrum1D marginal_spectrum(const RealField2D& field, Axis axis);
Spectrum1D convolve_gaussian(const Spectrum1D& spec, double fwhm);

RealField2D intensity(const ComplexField2D& field);
ComplexField2D normalize_l2(const ComplexField2D& field);

// Running integral of the piecewise-linear interpolant of a spectrum.
// Arguments outside the grid are clamped to it.
class CumulativeIntegral {
 public:
  explicit CumulativeIntegral(const Spectrum1D& spec);
  double operator()(double w) const;
  double between(double a, double b) const { return (*this)(b) - (*this)(a); }

 private:
  FrequencyGrid grid_;
  std::vector<double> y_;
  std::vector<double> cum_;
};

// FWHM of a single-peaked sampled curve by linear interpolation of the
// half-maximum crossings around the global maximum.
double fwhm_of(std::span<const double> x, std::span<const double> y);

extern template class Field2D<cplx>;
extern template class Field2D<double>;

}  // namespace hfeq
