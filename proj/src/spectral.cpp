#include "hfeq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hfeq/errors.hpp"
#include "hfeq/parallel.hpp"
#include "hfeq/units.hpp"

namespace hfeq {

FrequencyGrid make_grid(double center, double span, std::size_t n_points) {
  if (!std::isfinite(center) || !std::isfinite(span))
    throw InvalidArgument("make_grid: non-finite center or span");
  if (!(span > 0.0)) throw InvalidArgument("make_grid: span must be positive");
  if (n_points < 2) throw InvalidArgument("make_grid: need at least 2 points");
  FrequencyGrid g;
  g.center_ = center;
  g.span_ = span;
  g.n_ = n_points;
  g.spacing_ = span / static_cast<double>(n_points - 1);
  if (!(g.lo() + g.spacing_ > g.lo()))
    throw InvalidArgument("make_grid: spacing below floating-point resolution at this center");
  return g;
}

std::vector<double> FrequencyGrid::samples() const {
  std::vector<double> out(n_);
  for (std::size_t k = 0; k < n_; ++k) out[k] = at(k);
  return out;
}

template <typename T>
Field2D<T>::Field2D(FrequencyGrid grid_s, FrequencyGrid grid_i)
    : grid_s_(grid_s), grid_i_(grid_i), values_(grid_s.n_points() * grid_i.n_points()) {}

template <typename T>
Field2D<T>::Field2D(FrequencyGrid grid_s, FrequencyGrid grid_i, std::vector<T> values)
    : grid_s_(grid_s), grid_i_(grid_i), values_(std::move(values)) {
  if (values_.size() != grid_s_.n_points() * grid_i_.n_points())
    throw InvalidArgument("Field2D: value count does not match grid sizes");
}

template class Field2D<cplx>;
template class Field2D<double>;

Spectrum1D::Spectrum1D(FrequencyGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.n_points())
    throw InvalidArgument("Spectrum1D: value count does not match grid");
  for (double v : values_)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw InvalidArgument("Spectrum1D: values must be finite and non-negative");
}

double integrate_1d(const Spectrum1D& spec) {
  double acc = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) acc += spec.grid().weight(k) * spec[k];
  return acc;
}

double integrate_2d(const RealField2D& field) {
  const auto& gs = field.grid_s();
  const auto& gi = field.grid_i();
  std::vector<double> rows(field.n_s());
  parallel::for_each_index(field.n_s(), [&](std::size_t s) {
    auto r = field.row(s);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) acc += gi.weight(i) * r[i];
    rows[s] = acc * gs.weight(s);
  });
  double total = 0.0;
  for (double r : rows) total += r;
  return total;
}

Spectrum1D marginal_spectrum(const RealField2D& field, Axis axis) {
  const auto& gs = field.grid_s();
  const auto& gi = field.grid_i();
  if (axis == Axis::signal) {
    std::vector<double> out(field.n_s());
    parallel::for_each_index(field.n_s(), [&](std::size_t s) {
      auto r = field.row(s);
      double acc = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) acc += gi.weight(i) * r[i];
      out[s] = acc;
    });
    return Spectrum1D(gs, std::move(out));
  }
  std::vector<double> out(field.n_i());
  parallel::for_each_index(field.n_i(), [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t s = 0; s < field.n_s(); ++s) acc += gs.weight(s) * field(s, i);
    out[i] = acc;
  });
  return Spectrum1D(gi, std::move(out));
}

Spectrum1D convolve_gaussian(const Spectrum1D& spec, double fwhm) {
  if (!(fwhm >= 0.0) || !std::isfinite(fwhm))
    throw InvalidArgument("convolve_gaussian: fwhm must be finite and >= 0");
  if (fwhm == 0.0) return spec;
  const double h = spec.grid().spacing();
  if (h > fwhm / 4.0)
    throw ResolutionError("convolve_gaussian: grid spacing " + std::to_string(h) +
                          " exceeds fwhm/4 = " + std::to_string(fwhm / 4.0));

  const double sigma = fwhm / std::sqrt(8.0 * units::ln2);
  const auto m = static_cast<std::ptrdiff_t>(std::ceil(5.0 * sigma / h));
  std::vector<double> kernel(2 * m + 1);
  double norm = 0.0;
  for (std::ptrdiff_t k = -m; k <= m; ++k) {
    const double x = static_cast<double>(k) * h;
    kernel[k + m] = std::exp(-4.0 * units::ln2 * x * x / (fwhm * fwhm));
    norm += kernel[k + m];
  }
  for (double& w : kernel) w /= norm;

  const auto n = static_cast<std::ptrdiff_t>(spec.size());
  const auto& in = spec.values();
  std::vector<double> out(spec.size());
  parallel::for_each_index(spec.size(), [&](std::size_t jj) {
    const auto j = static_cast<std::ptrdiff_t>(jj);
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(-m, j - (n - 1));
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(m, j);
    double acc = 0.0;
    for (std::ptrdiff_t k = lo; k <= hi; ++k) acc += kernel[k + m] * in[j - k];
    out[jj] = acc;
  });
  return Spectrum1D(spec.grid(), std::move(out));
}

RealField2D intensity(const ComplexField2D& field) {
  RealField2D out(field.grid_s(), field.grid_i());
  const auto& in = field.values();
  auto& v = out.values();
  for (std::size_t k = 0; k < in.size(); ++k) v[k] = std::norm(in[k]);
  return out;
}

ComplexField2D normalize_l2(const ComplexField2D& field) {
  const double norm2 = integrate_2d(intensity(field));
  if (!(norm2 > 0.0) || !std::isfinite(norm2))
    throw InvalidArgument("normalize_l2: field has zero or non-finite norm");
  const double scale = 1.0 / std::sqrt(norm2);
  ComplexField2D out = field;
  for (auto& v : out.values()) v *= scale;
  return out;
}

CumulativeIntegral::CumulativeIntegral(const Spectrum1D& spec)
    : grid_(spec.grid()), y_(spec.values()), cum_(spec.size(), 0.0) {
  const double h = grid_.spacing();
  for (std::size_t k = 1; k < y_.size(); ++k) cum_[k] = cum_[k - 1] + 0.5 * h * (y_[k - 1] + y_[k]);
}

double CumulativeIntegral::operator()(double w) const {
  if (w <= grid_.lo()) return 0.0;
  if (w >= grid_.hi()) return cum_.back();
  const double h = grid_.spacing();
  auto k = static_cast<std::size_t>((w - grid_.lo()) / h);
  k = std::min(k, y_.size() - 2);
  const double dx = w - grid_.at(k);
  const double slope = (y_[k + 1] - y_[k]) / h;
  return cum_[k] + dx * (y_[k] + 0.5 * slope * dx);
}

double fwhm_of(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw InvalidArgument("fwhm_of: bad sample arrays");
  const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double half = 0.5 * y[peak];
  std::size_t l = peak;
  while (l > 0 && y[l] > half) --l;
  std::size_t r = peak;
  while (r + 1 < y.size() && y[r] > half) ++r;
  if (y[l] > half || y[r] > half) throw DegenerateInput("fwhm_of: curve does not fall to half maximum");
  auto cross = [&](std::size_t a, std::size_t b) {
    return x[a] + (half - y[a]) * (x[b] - x[a]) / (y[b] - y[a]);
  };
  return cross(r - 1, r) - cross(l, l + 1);
}

}  // namespace hfeq
