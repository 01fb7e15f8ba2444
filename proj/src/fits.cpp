#include "hfeq/fits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hfeq/errors.hpp"
#include "hfeq/lm.hpp"
#include "hfeq/units.hpp"

namespace hfeq {

using units::ln2;
using units::pi;

const FitParameter& FitResult::get(const std::string& name) const {
  for (const auto& p : parameters)
    if (p.name == name) return p;
  throw InvalidArgument("FitResult: no parameter named " + name);
}

double comb_value(double omega, const CombParams& p) {
  const double x = omega - p.center;
  const double env = std::exp(-16.0 * ln2 * x * x / (p.delta_omega_S * p.delta_omega_S));
  return 0.5 * p.n0 * env * (1.0 + p.visibility * std::cos(2.0 * x * p.tau_H));
}

Spectrum1D comb_spectrum(const FrequencyGrid& grid, const CombParams& p) {
  if (!(p.n0 >= 0.0) || !(p.visibility >= 0.0 && p.visibility <= 1.0) || !(p.delta_omega_S > 0.0))
    throw InvalidArgument("comb_spectrum: need n0 >= 0, 0 <= V <= 1, bandwidth > 0");
  std::vector<double> v(grid.n_points());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = comb_value(grid.at(k), p);
  return Spectrum1D(grid, std::move(v));
}

namespace {

constexpr double kVmax = 1.05;

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit_v(double v) {
  const double q = std::clamp(v / kVmax, 1e-9, 1.0 - 1e-9);
  return std::log(q / (1.0 - q));
}

// Sampled data shared by the comb and fringe fits.
struct Samples {
  std::vector<double> x, lo, hi, y, sigma;
  bool binned = false;
  bool weighted = false;
  double mean_width = 1.0;
};

Samples from_histogram(const std::vector<double>& edges, const std::vector<double>& y, bool poisson) {
  if (edges.size() != y.size() + 1 || y.size() < 2) throw InvalidArgument("fit: malformed histogram");
  Samples s;
  s.binned = true;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double a = edges[k], b = edges[k + 1];
    if (!(b > a)) throw InvalidArgument("fit: histogram edges must be strictly increasing");
    s.lo.push_back(a);
    s.hi.push_back(b);
    s.x.push_back(0.5 * (a + b));
    s.y.push_back(y[k]);
    s.sigma.push_back(poisson ? std::sqrt(std::max(y[k], 1.0)) : 1.0);
  }
  s.weighted = poisson;
  s.mean_width = (edges.back() - edges.front()) / static_cast<double>(y.size());
  return s;
}

// Covariance from the natural-parameter Jacobian (already divided by sigma),
// with column equilibration.
Eigen::MatrixXd covariance(const Eigen::MatrixXd& jn, double scale) {
  const Eigen::Index n = jn.cols();
  Eigen::MatrixXd a = jn.transpose() * jn;
  Eigen::VectorXd d = a.diagonal().cwiseSqrt();
  for (Eigen::Index j = 0; j < n; ++j)
    if (!(d[j] > 0.0)) d[j] = 1.0;
  const Eigen::MatrixXd as = d.asDiagonal().inverse() * a * d.asDiagonal().inverse();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(as);
  if (!lu.isInvertible()) return Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  return scale * (d.asDiagonal().inverse() * lu.inverse() * d.asDiagonal().inverse());
}

void fill_history(FitResult& out, const lm::Report& rep) {
  out.converged = rep.converged;
  out.iterations = rep.iterations;
  out.residual_norm = std::sqrt(2.0 * rep.cost);
  for (double c : rep.accepted_costs) out.residual_history.push_back(std::sqrt(2.0 * c));
  out.diagnostics["initial_gradient"] = rep.initial_gradient;
  out.diagnostics["final_gradient"] = rep.final_gradient;
}

double weighted_norm(const Samples& s) {
  double acc = 0.0;
  for (std::size_t b = 0; b < s.y.size(); ++b) acc += (s.y[b] / s.sigma[b]) * (s.y[b] / s.sigma[b]);
  return std::sqrt(acc);
}

// ---- comb ----

// Value and natural-parameter gradient at one frequency.
// th = [N0, V, tau, dS, c]
double comb_point(double w, const double* th, double* grad) {
  const double x = w - th[4];
  const double ds = th[3];
  const double e = std::exp(-16.0 * ln2 * x * x / (ds * ds));
  const double cs = std::cos(2.0 * x * th[2]);
  const double sn = std::sin(2.0 * x * th[2]);
  const double h = 0.5 * th[0];
  const double val = h * e * (1.0 + th[1] * cs);
  if (grad) {
    grad[0] = 0.5 * e * (1.0 + th[1] * cs);
    grad[1] = h * e * cs;
    grad[2] = -h * e * th[1] * sn * 2.0 * x;
    grad[3] = val * 32.0 * ln2 * x * x / (ds * ds * ds);
    grad[4] = val * 32.0 * ln2 * x / (ds * ds) + h * e * th[1] * sn * 2.0 * th[2];
  }
  return val;
}

// Bin average (Simpson) or point value.
double comb_sample(const Samples& s, std::size_t b, const double* th, double* grad) {
  if (!s.binned) return comb_point(s.x[b], th, grad);
  const double a = s.lo[b], c = s.hi[b], m = 0.5 * (a + c);
  const double f = (c - a) / (6.0 * s.mean_width);
  double ga[5], gm[5], gc[5];
  const double v = f * (comb_point(a, th, grad ? ga : nullptr) + 4.0 * comb_point(m, th, grad ? gm : nullptr) +
                        comb_point(c, th, grad ? gc : nullptr));
  if (grad)
    for (int j = 0; j < 5; ++j) grad[j] = f * (ga[j] + 4.0 * gm[j] + gc[j]);
  return v;
}

struct CombSeed {
  double n0, v, tau, ds, c;
};

CombSeed seed_comb(const Samples& s, const CombFitOptions& opt) {
  const std::size_t m = s.x.size();
  std::vector<double> wgt(m);  // ≈ S(x_b) * width, the integral carried by sample b
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t b = 0; b < m; ++b) {
    wgt[b] = std::max(s.y[b], 0.0) * s.mean_width;
    m0 += wgt[b];
    m1 += wgt[b] * (s.x[b] - s.x[0]);
  }
  if (!(m0 > 0.0)) throw PreconditionError("fit_comb: data carry no counts");
  const double c0 = s.x[0] + m1 / m0;
  double m2 = 0.0;
  for (std::size_t b = 0; b < m; ++b) m2 += wgt[b] * (s.x[b] - c0) * (s.x[b] - c0);
  const double var = m2 / m0;
  const double ds0 = std::sqrt(32.0 * ln2 * var);
  const double sigma_env = ds0 / std::sqrt(32.0 * ln2);

  // Periodogram of the spectrum: the comb term cos(2xτ) shows up at t = 2τ.
  const double span = s.x.back() - s.x.front();
  const double dt = pi / (4.0 * span);
  const double t_max = pi / s.mean_width;
  const double t_start = 2.5 / sigma_env;
  auto power = [&](double t) {
    double re = 0.0, im = 0.0;
    for (std::size_t b = 0; b < m; ++b) {
      const double ph = t * (s.x[b] - c0);
      re += wgt[b] * std::cos(ph);
      im -= wgt[b] * std::sin(ph);
    }
    return std::hypot(re, im);
  };
  std::vector<double> ts, ps;
  for (double t = t_start; t <= t_max; t += dt) {
    ts.push_back(t);
    ps.push_back(power(t));
  }
  if (ts.size() < 3) throw PreconditionError("fit_comb: sampling too coarse to resolve any comb");
  const auto k = static_cast<std::size_t>(std::max_element(ps.begin(), ps.end()) - ps.begin());
  if (k == 0 || k + 1 == ts.size())
    throw PreconditionError("fit_comb: no comb periodicity found in the spectrum");
  const double y0 = ps[k - 1], y1 = ps[k], y2 = ps[k + 1];
  const double denom = y0 - 2.0 * y1 + y2;
  const double shift = denom != 0.0 ? 0.5 * (y0 - y2) / denom : 0.0;
  const double t_peak = ts[k] + std::clamp(shift, -0.5, 0.5) * dt;
  const double tau0 = 0.5 * t_peak;

  // Teeth whose envelope exceeds 5% of its peak.
  const double reach = 0.25 * ds0 * std::sqrt(std::log(20.0) / ln2);
  const int teeth = 2 * static_cast<int>(std::floor(reach * tau0 / pi)) + 1;
  if (teeth < opt.min_teeth)
    throw PreconditionError("fit_comb: only " + std::to_string(teeth) +
                            " comb teeth visible; tau_H and V_H are not separable");

  const double env_area = 0.25 * ds0 * std::sqrt(pi / ln2);
  const double v0 = std::clamp(2.0 * power(t_peak) / m0, 0.05, 1.0);
  return {2.0 * m0 / env_area, v0, tau0, ds0, c0};
}

FitResult run_comb(const Samples& data, const CombFitOptions& opt) {
  const CombSeed seed = seed_comb(data, opt);
  Samples s = data;  // sigma is refined below for count data
  const std::size_t m = s.x.size();

  auto natural = [&](const Eigen::VectorXd& p, double* th, double* dth) {
    th[0] = seed.n0 * p[0];
    th[1] = kVmax * logistic(p[1]);
    th[2] = std::exp(p[2]);
    th[3] = std::exp(p[3]);
    th[4] = seed.c + seed.ds * p[4];
    if (dth) {
      dth[0] = seed.n0;
      dth[1] = th[1] * (1.0 - th[1] / kVmax);
      dth[2] = th[2];
      dth[3] = th[3];
      dth[4] = seed.ds;
    }
  };

  lm::Model model = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    double th[5], dth[5], g[5];
    natural(p, th, dth);
    for (std::size_t b = 0; b < m; ++b) {
      const double mu = comb_sample(s, b, th, jac ? g : nullptr);
      const auto bi = static_cast<Eigen::Index>(b);
      r[bi] = (mu - s.y[b]) / s.sigma[b];
      if (jac)
        for (int j = 0; j < 5; ++j) (*jac)(bi, j) = g[j] * dth[j] / s.sigma[b];
    }
  };

  Eigen::VectorXd p0(5);
  p0 << 1.0, logit_v(seed.v), std::log(seed.tau), std::log(seed.ds), 0.0;
  lm::Options lo;
  lo.max_iterations = opt.max_iterations;
  lo.data_scale = weighted_norm(s);
  lm::Report rep = lm::solve(model, p0, m, lo);

  double th[5];
  natural(rep.params, th, nullptr);

  // Count data: observed-count weights bias low bins downward, so iterate the
  // weights to the fitted model (IRLS), which lands on the Poisson ML estimate.
  int passes = 0;
  if (s.weighted) {
    double peak = 0.0;
    for (std::size_t b = 0; b < m; ++b) peak = std::max(peak, comb_sample(s, b, th, nullptr));
    for (; passes < 8; ++passes) {
      for (std::size_t b = 0; b < m; ++b)
        s.sigma[b] = std::sqrt(std::max(comb_sample(s, b, th, nullptr), 1e-9 * peak));
      lo.data_scale = weighted_norm(s);
      const Eigen::VectorXd before = rep.params;
      rep = lm::solve(model, before, m, lo);
      natural(rep.params, th, nullptr);
      if ((rep.params - before).norm() <= 1e-9 * (1.0 + before.norm())) break;
    }
  }
  Eigen::MatrixXd jn(m, 5);
  for (std::size_t b = 0; b < m; ++b) {
    double g[5];
    comb_sample(s, b, th, g);
    for (int j = 0; j < 5; ++j) jn(static_cast<Eigen::Index>(b), j) = g[j] / s.sigma[b];
  }
  const double dof = static_cast<double>(m) - 5.0;
  const double scale = s.weighted ? 1.0 : (dof > 0 ? 2.0 * rep.cost / dof : 0.0);
  const Eigen::MatrixXd cov = covariance(jn, scale);

  FitResult out;
  const char* names[5] = {"N0", "V_H", "tau_H", "delta_omega_S", "center"};
  const char* unit_names[5] = {"counts", "1", "s", "rad/s", "rad/s"};
  for (int j = 0; j < 5; ++j) {
    out.parameters.push_back({names[j], th[j], unit_names[j], std::sqrt(std::max(cov(j, j), 0.0))});
    out.covariance_diag.push_back(cov(j, j));
  }
  const double spacing = 1.0 / (2.0 * th[2]);
  out.parameters.push_back({"mode_spacing", spacing, "Hz", std::sqrt(std::max(cov(2, 2), 0.0)) / (2.0 * th[2] * th[2])});
  out.covariance_diag.push_back(out.parameters.back().std_error * out.parameters.back().std_error);
  fill_history(out, rep);
  out.diagnostics["seed_tau_H"] = seed.tau;
  out.diagnostics["seed_delta_omega_S"] = seed.ds;
  out.diagnostics["reweight_passes"] = passes;
  return out;
}

// ---- fringe ----

FitResult run_fringe(const Samples& s, double hint, const FringeFitOptions& opt) {
  const std::size_t m = s.x.size();
  if (m < 5) throw PreconditionError("fit_fringe: need at least 5 samples");
  const double span = s.x.back() - s.x.front();
  if (!(span > 0.0)) throw PreconditionError("fit_fringe: scan values must increase");
  const double x0 = 0.5 * (s.x.front() + s.x.back());
  const double B = opt.background;

  double k0 = opt.phase_rate.value_or(hint);
  if (!(k0 > 0.0)) {
    // Periodogram over rates from one period per span to the sampling limit.
    double dx = span;
    for (std::size_t b = 1; b < m; ++b) dx = std::min(dx, s.x[b] - s.x[b - 1]);
    const double mean = std::accumulate(s.y.begin(), s.y.end(), 0.0) / static_cast<double>(m);
    const double step = pi / (8.0 * span);
    double best = -1.0;
    std::size_t best_i = 0, i = 0;
    for (double k = 2.0 * pi / span; k <= pi / dx; k += step, ++i) {
      double re = 0.0, im = 0.0;
      for (std::size_t b = 0; b < m; ++b) {
        re += (s.y[b] - mean) * std::cos(k * (s.x[b] - x0));
        im += (s.y[b] - mean) * std::sin(k * (s.x[b] - x0));
      }
      const double pw = re * re + im * im;
      if (pw > best) {
        best = pw;
        best_i = i;
        k0 = k;
      }
    }
    if (best_i == 0) throw PreconditionError("fit_fringe: scan does not cover a full fringe period");
  }
  if (k0 * span < 2.0 * pi * (1.0 - 1e-9))
    throw PreconditionError("fit_fringe: scan spans " + std::to_string(k0 * span / (2.0 * pi)) +
                            " fringe periods; need at least 1");

  // Linear seed for A, V, φ0 at fixed k.
  Eigen::MatrixXd X(m, 3);
  Eigen::VectorXd Y(m);
  for (std::size_t b = 0; b < m; ++b) {
    const double ph = k0 * (s.x[b] - x0);
    X(b, 0) = 1.0;
    X(b, 1) = std::cos(ph);
    X(b, 2) = std::sin(ph);
    Y(b) = s.y[b] - B;
  }
  const Eigen::Vector3d lin = X.colPivHouseholderQr().solve(Y);
  const double a0 = lin[0];
  if (!(a0 > 0.0)) throw PreconditionError("fit_fringe: non-positive mean signal above the background");
  const double v0 = std::clamp(std::hypot(lin[1], lin[2]) / a0, 1e-6, 1.0);
  const double phi0 = std::atan2(-lin[2], lin[1]);

  const int np = opt.fit_rate ? 4 : 3;
  auto natural = [&](const Eigen::VectorXd& p, double* th, double* dth) {
    th[0] = a0 * p[0];
    th[1] = kVmax * logistic(p[1]);
    th[2] = p[2];
    th[3] = opt.fit_rate ? k0 * std::exp(p[3]) : k0;
    if (dth) {
      dth[0] = a0;
      dth[1] = th[1] * (1.0 - th[1] / kVmax);
      dth[2] = 1.0;
      dth[3] = th[3];
    }
  };
  auto point = [&](std::size_t b, const double* th, double* g) {
    const double u = s.x[b] - x0;
    const double cs = std::cos(th[3] * u + th[2]);
    const double sn = std::sin(th[3] * u + th[2]);
    g[0] = 1.0 + th[1] * cs;
    g[1] = th[0] * cs;
    g[2] = -th[0] * th[1] * sn;
    g[3] = -th[0] * th[1] * sn * u;
    return B + th[0] * (1.0 + th[1] * cs);
  };

  lm::Model model = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    double th[4], dth[4], g[4];
    natural(p, th, dth);
    for (std::size_t b = 0; b < m; ++b) {
      const auto bi = static_cast<Eigen::Index>(b);
      r[bi] = (point(b, th, g) - s.y[b]) / s.sigma[b];
      if (jac)
        for (int j = 0; j < np; ++j) (*jac)(bi, j) = g[j] * dth[j] / s.sigma[b];
    }
  };
  Eigen::VectorXd p0(np);
  p0[0] = 1.0;
  p0[1] = logit_v(v0);
  p0[2] = phi0;
  if (opt.fit_rate) p0[3] = 0.0;
  lm::Options lo;
  lo.max_iterations = opt.max_iterations;
  lo.data_scale = weighted_norm(s);
  const lm::Report rep = lm::solve(model, p0, m, lo);

  double th[4];
  natural(rep.params, th, nullptr);
  Eigen::MatrixXd jn(m, np);
  for (std::size_t b = 0; b < m; ++b) {
    double g[4];
    point(b, th, g);
    for (int j = 0; j < np; ++j) jn(static_cast<Eigen::Index>(b), j) = g[j] / s.sigma[b];
  }
  const double dof = static_cast<double>(m) - np;
  const Eigen::MatrixXd cov = covariance(jn, s.weighted ? 1.0 : (dof > 0 ? 2.0 * rep.cost / dof : 0.0));

  // Wrap φ0 into (-π, π].
  double phi = std::remainder(th[2], 2.0 * pi);

  FitResult out;
  auto add = [&](const char* name, double v, const char* unit, double var) {
    out.parameters.push_back({name, v, unit, std::sqrt(std::max(var, 0.0))});
    out.covariance_diag.push_back(var);
  };
  add("A", th[0], "counts", cov(0, 0));
  add("B", B, "counts", 0.0);
  add("V", th[1], "1", cov(1, 1));
  add("phi0", phi, "rad", cov(2, 2));
  add("phase_rate", th[3], "rad per scan unit", opt.fit_rate ? cov(3, 3) : 0.0);
  add("period", 2.0 * pi / th[3], "scan unit",
      opt.fit_rate ? cov(3, 3) * std::pow(2.0 * pi / (th[3] * th[3]), 2) : 0.0);
  const double raw = th[0] * th[1] / (th[0] + B);
  const double dA = th[1] * B / ((th[0] + B) * (th[0] + B));
  const double dV = th[0] / (th[0] + B);
  add("raw_visibility", raw, "1", dA * dA * cov(0, 0) + dV * dV * cov(1, 1) + 2.0 * dA * dV * cov(0, 1));
  out.flags["exceeds_classical_bound"] = th[1] > 1.0 / std::sqrt(2.0);
  out.diagnostics["x_ref"] = x0;
  out.diagnostics["periods_spanned"] = th[3] * span / (2.0 * pi);
  fill_history(out, rep);
  return out;
}

}  // namespace

FitResult fit_comb(const CountHistogram& hist, const CombFitOptions& opt) {
  if (hist.unit != EdgeUnit::radians_per_second)
    throw InvalidArgument("fit_comb: histogram must be expressed in angular frequency");
  std::vector<double> y(hist.counts.begin(), hist.counts.end());
  return run_comb(from_histogram(hist.bin_edges, y, true), opt);
}

FitResult fit_comb(const Spectrum1D& spec, const CombFitOptions& opt) {
  Samples s;
  s.x = spec.grid().samples();
  s.y = spec.values();
  s.sigma.assign(s.x.size(), 1.0);
  s.mean_width = spec.grid().spacing();
  return run_comb(s, opt);
}

FitResult fit_fringe(const FringeScan& scan, const FringeFitOptions& opt) {
  if (scan.scan_values.size() != scan.probabilities.size())
    throw InvalidArgument("fit_fringe: scan and probability lengths differ");
  Samples s;
  std::vector<std::size_t> order(scan.scan_values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scan.scan_values[a] < scan.scan_values[b]; });
  for (auto k : order) {
    s.x.push_back(scan.scan_values[k]);
    s.y.push_back(scan.probabilities[k]);
  }
  s.sigma.assign(s.x.size(), 1.0);
  return run_fringe(s, scan.nominal_phase_rate, opt);
}

FitResult fit_fringe(const CountHistogram& hist, const FringeFitOptions& opt) {
  std::vector<double> y(hist.counts.begin(), hist.counts.end());
  Samples s = from_histogram(hist.bin_edges, y, true);
  s.binned = false;  // phase bins are narrow; evaluate at centres
  return run_fringe(s, 0.0, opt);
}

FitResult fit_fringe(const RealHistogram& hist, const FringeFitOptions& opt) {
  Samples s = from_histogram(hist.bin_edges, hist.values, false);
  s.binned = false;
  return run_fringe(s, 0.0, opt);
}

FitResult fit_linear_calibration(const std::vector<std::pair<double, double>>& points) {
  const std::size_t n = points.size();
  if (n < 2) throw PreconditionError("fit_linear_calibration: need at least two points");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw InvalidArgument("fit_linear_calibration: non-finite point");
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 1e-24 * (mx * mx + 1.0) * static_cast<double>(n)))
    throw PreconditionError("fit_linear_calibration: wavelengths are not distinct");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double rss = 0.0;
  for (const auto& [x, y] : points) {
    const double r = y - (slope * x + intercept);
    rss += r * r;
  }
  const double s2 = n > 2 ? rss / static_cast<double>(n - 2) : 0.0;
  const double var_slope = s2 / sxx;
  const double var_icpt = s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx);

  FitResult out;
  out.parameters.push_back({"slope", slope, "ns/nm", std::sqrt(var_slope)});
  out.parameters.push_back({"intercept", intercept, "ns", std::sqrt(var_icpt)});
  out.covariance_diag = {var_slope, var_icpt};
  out.residual_norm = std::sqrt(rss);
  out.residual_history = {out.residual_norm};
  out.converged = true;
  out.iterations = 1;
  return out;
}

}  // namespace hfeq
