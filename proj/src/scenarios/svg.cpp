#include "hfeq/scenarios/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "hfeq/scenarios/output.hpp"
#include "hfeq/units.hpp"

namespace hfeq::scenarios::svg {

namespace {

constexpr double kWidth = 640.0, kHeight = 420.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 36.0, kBottom = 52.0;

std::string fx(double v, int digits = 2) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
  return std::string(buf, r.ptr);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) {
  if (v == 0.0) return "0";
  const double a = std::abs(v);
  if (a >= 1e4 || a < 1e-3) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 2);
    return std::string(buf, r.ptr);
  }
  return format_number(std::round(v * 1e6) / 1e6);
}

std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step)
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  return ticks;
}

void pad_range(double& lo, double& hi) {
  if (!(hi > lo)) {
    const double d = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
    lo -= d;
    hi += d;
  }
}

const std::array<const char*, 6> kColours{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string header(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fx(kWidth, 0) + "\" height=\"" + fx(kHeight, 0) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         "<text x=\"" + fx(kWidth / 2, 1) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) +
         "</text>\n";
}

std::string axes(double x0, double x1, double y0, double y1, const std::string& xl, const std::string& yl) {
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  std::string out = "<rect x=\"" + fx(kLeft) + "\" y=\"" + fx(kTop) + "\" width=\"" + fx(pw) + "\" height=\"" + fx(ph) +
                    "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : nice_ticks(x0, x1)) {
    const double px = kLeft + (t - x0) / (x1 - x0) * pw;
    out += "<line x1=\"" + fx(px) + "\" y1=\"" + fx(kTop + ph) + "\" x2=\"" + fx(px) + "\" y2=\"" + fx(kTop + ph + 5) +
           "\" stroke=\"black\"/>\n<text x=\"" + fx(px) + "\" y=\"" + fx(kTop + ph + 18) +
           "\" text-anchor=\"middle\">" + tick_label(t) + "</text>\n";
  }
  for (double t : nice_ticks(y0, y1)) {
    const double py = kTop + ph - (t - y0) / (y1 - y0) * ph;
    out += "<line x1=\"" + fx(kLeft - 5) + "\" y1=\"" + fx(py) + "\" x2=\"" + fx(kLeft) + "\" y2=\"" + fx(py) +
           "\" stroke=\"black\"/>\n<text x=\"" + fx(kLeft - 8) + "\" y=\"" + fx(py + 4) + "\" text-anchor=\"end\">" +
           tick_label(t) + "</text>\n";
  }
  out += "<text x=\"" + fx(kLeft + pw / 2) + "\" y=\"" + fx(kHeight - 12) + "\" text-anchor=\"middle\">" + escape(xl) +
         "</text>\n";
  out += "<text transform=\"translate(16," + fx(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" + escape(yl) +
         "</text>\n";
  return out;
}

// Viridis anchors, linearly interpolated.
std::string viridis(double t) {
  static const double c[9][3] = {{68, 1, 84},    {71, 44, 122},  {59, 81, 139},  {44, 113, 142}, {33, 144, 141},
                                 {39, 173, 129}, {92, 200, 99},  {170, 220, 50}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 8.0;
  const int k = std::min(static_cast<int>(t), 7);
  const double f = t - k;
  char buf[8];
  int rgb[3];
  for (int j = 0; j < 3; ++j) rgb[j] = static_cast<int>(std::lround(c[k][j] + f * (c[k + 1][j] - c[k][j])));
  static const char* hex = "0123456789abcdef";
  buf[0] = '#';
  for (int j = 0; j < 3; ++j) {
    buf[1 + 2 * j] = hex[rgb[j] >> 4];
    buf[2 + 2 * j] = hex[rgb[j] & 15];
  }
  return std::string(buf, 7);
}

}  // namespace

std::string line_plot(const LinePlot& plot) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series)
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.y[k]);
      y1 = std::max(y1, s.y[k]);
    }
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  pad_range(x0, x1);
  pad_range(y0, y1);
  const double ypad = 0.05 * (y1 - y0);
  y0 -= ypad;
  y1 += ypad;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - y0) / (y1 - y0) * ph; };

  std::string out = header(plot.title) + axes(x0, x1, y0, y1, plot.x_label, plot.y_label);
  for (std::size_t n = 0; n < plot.series.size(); ++n) {
    const auto& s = plot.series[n];
    const char* colour = kColours[n % kColours.size()];
    std::string pts;
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      pts += fx(px(s.x[k])) + "," + fx(py(s.y[k])) + " ";
    }
    if (s.markers) {
      for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k)
        if (std::isfinite(s.x[k]) && std::isfinite(s.y[k]))
          out += "<circle cx=\"" + fx(px(s.x[k])) + "\" cy=\"" + fx(py(s.y[k])) + "\" r=\"3\" fill=\"" + colour + "\"/>\n";
    } else {
      out += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\" points=\"" + pts +
             "\"/>\n";
    }
    if (!s.label.empty()) {
      const double ly = kTop + 14.0 + 16.0 * static_cast<double>(n);
      out += "<line x1=\"" + fx(kWidth - kRight - 150) + "\" y1=\"" + fx(ly - 4) + "\" x2=\"" +
             fx(kWidth - kRight - 130) + "\" y2=\"" + fx(ly - 4) + "\" stroke=\"" + colour +
             "\" stroke-width=\"2\"/>\n<text x=\"" + fx(kWidth - kRight - 125) + "\" y=\"" + fx(ly) + "\">" +
             escape(s.label) + "</text>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

std::string heatmap(const RealField2D& field, const std::string& title, std::size_t max_cells) {
  const auto& gs = field.grid_s();
  const auto& gi = field.grid_i();
  const std::size_t step_s = (field.n_s() + max_cells - 1) / max_cells;
  const std::size_t step_i = (field.n_i() + max_cells - 1) / max_cells;
  const std::size_t cs = (field.n_s() + step_s - 1) / step_s;
  const std::size_t ci = (field.n_i() + step_i - 1) / step_i;

  // Block maxima keep narrow ridges visible after downsampling.
  std::vector<double> cells(cs * ci, 0.0);
  double peak = 0.0;
  for (std::size_t s = 0; s < field.n_s(); ++s)
    for (std::size_t i = 0; i < field.n_i(); ++i) {
      double& c = cells[(s / step_s) * ci + i / step_i];
      c = std::max(c, field(s, i));
      peak = std::max(peak, field(s, i));
    }

  const double x0 = units::angular_to_ghz(gs.lo() - gs.center()), x1 = units::angular_to_ghz(gs.hi() - gs.center());
  const double y0 = units::angular_to_ghz(gi.lo() - gi.center()), y1 = units::angular_to_ghz(gi.hi() - gi.center());
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const double w = pw / static_cast<double>(cs), h = ph / static_cast<double>(ci);

  std::string out = header(title);
  out += "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t a = 0; a < cs; ++a)
    for (std::size_t b = 0; b < ci; ++b) {
      const double v = peak > 0.0 ? cells[a * ci + b] / peak : 0.0;
      out += "<rect x=\"" + fx(kLeft + a * w) + "\" y=\"" + fx(kTop + ph - (b + 1) * h) + "\" width=\"" + fx(w + 0.05) +
             "\" height=\"" + fx(h + 0.05) + "\" fill=\"" + viridis(v) + "\"/>\n";
    }
  out += "</g>\n";
  out += axes(x0, x1, y0, y1, "signal detuning (GHz)", "idler detuning (GHz)");
  out += "</svg>\n";
  return out;
}

}  // namespace hfeq::scenarios::svg
