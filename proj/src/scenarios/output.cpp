#include "hfeq/scenarios/output.hpp"

#include <charconv>
#include <fstream>

#include "hfeq/errors.hpp"
#include "hfeq/units.hpp"

namespace hfeq::scenarios {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

struct EdgeFormat {
  const char* unit;
  double divisor;
};

EdgeFormat edge_format(EdgeUnit u) {
  switch (u) {
    case EdgeUnit::seconds: return {"ns", units::ns};
    case EdgeUnit::radians_per_second: return {"GHz", units::two_pi * 1e9};
    case EdgeUnit::radians: return {"rad", 1.0};
  }
  return {"", 1.0};
}

template <typename Values>
std::string histogram_text(const std::vector<double>& edges, const Values& values, EdgeUnit unit) {
  const auto f = edge_format(unit);
  std::string out = std::string("# bin edges: ") + f.unit + "\nbin_lo,bin_hi,count\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    out += format_number(edges[k] / f.divisor);
    out += ',';
    out += format_number(edges[k + 1] / f.divisor);
    out += ',';
    if constexpr (std::is_integral_v<typename Values::value_type>)
      out += std::to_string(values[k]);
    else
      out += format_number(values[k]);
    out += '\n';
  }
  return out;
}

double to_ghz(double w) { return units::angular_to_ghz(w); }

}  // namespace

std::string histogram_csv(const CountHistogram& hist) {
  return histogram_text(hist.bin_edges, hist.counts, hist.unit);
}

std::string histogram_csv(const RealHistogram& hist) {
  return histogram_text(hist.bin_edges, hist.values, hist.unit);
}

std::string field_csv(const RealField2D& field) {
  const auto& gs = field.grid_s();
  const auto& gi = field.grid_i();
  std::string out = "# grid centres (GHz): signal " + format_number(to_ghz(gs.center())) + ", idler " +
                    format_number(to_ghz(gi.center())) + "\ndelta_s_ghz,delta_i_ghz,value\n";
  out.reserve(out.size() + field.values().size() * 32);
  for (std::size_t s = 0; s < field.n_s(); ++s) {
    const std::string xs = format_number(to_ghz(gs.at(s) - gs.center()));
    for (std::size_t i = 0; i < field.n_i(); ++i) {
      out += xs;
      out += ',';
      out += format_number(to_ghz(gi.at(i) - gi.center()));
      out += ',';
      out += format_number(field(s, i));
      out += '\n';
    }
  }
  return out;
}

std::string spectrum_csv(const Spectrum1D& spec, const std::string& value_label) {
  const auto& g = spec.grid();
  std::string out = "# grid centre (GHz): " + format_number(to_ghz(g.center())) + "\ndelta_ghz," + value_label + "\n";
  for (std::size_t k = 0; k < spec.size(); ++k) {
    out += format_number(to_ghz(g.at(k) - g.center()));
    out += ',';
    out += format_number(spec[k]);
    out += '\n';
  }
  return out;
}

std::string table_csv(const std::vector<std::string>& headers, const std::vector<std::vector<double>>& columns) {
  if (headers.size() != columns.size()) throw InvalidArgument("table_csv: header and column counts differ");
  std::string out;
  for (std::size_t c = 0; c < headers.size(); ++c) out += (c ? "," : "") + headers[c];
  out += '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& col : columns)
    if (col.size() != rows) throw InvalidArgument("table_csv: ragged columns");
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += format_number(columns[c][r]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const FitResult& fit) {
  nlohmann::json j;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& p : fit.parameters) params[p.name] = {{"value", p.value}, {"unit", p.unit}, {"stderr", p.std_error}};
  j["parameters"] = params;
  j["residual_norm"] = fit.residual_norm;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["residual_history"] = fit.residual_history;
  j["flags"] = fit.flags;
  j["diagnostics"] = fit.diagnostics;
  return j;
}

nlohmann::json to_json(const SchmidtResult& r) {
  const std::size_t keep = std::min<std::size_t>(r.coefficients.size(), 64);
  return {{"schmidt_number", r.schmidt_number},
          {"coefficients", std::vector<double>(r.coefficients.begin(), r.coefficients.begin() + static_cast<long>(keep))},
          {"rank", r.rank},
          {"sweeps", r.sweeps}};
}

nlohmann::json to_json(const BinDecomposition& d) {
  std::vector<double> centers_ghz;
  for (double c : d.bin_centers) centers_ghz.push_back(to_ghz(c - d.center));
  return {{"dimension", d.dimension},
          {"bin_offsets_ghz", centers_ghz},
          {"bin_weights", d.bin_weights},
          {"window_half_width_ghz", to_ghz(d.window_half_width)},
          {"center_ghz", to_ghz(d.center)}};
}

OutputSink::OutputSink(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_))
    throw PreconditionError("output directory " + dir_.string() + " is not writable: " + ec.message());
}

void OutputSink::text(const std::string& name, const std::string& kind, const std::string& description,
                      const std::string& content) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw PreconditionError("cannot write " + path.string());
  files_.push_back({{"path", name}, {"kind", kind}, {"description", description}, {"bytes", content.size()}});
}

void OutputSink::json(const std::string& name, const std::string& kind, const std::string& description,
                      const nlohmann::json& content) {
  text(name, kind, description, content.dump(2) + "\n");
}

}  // namespace hfeq::scenarios
