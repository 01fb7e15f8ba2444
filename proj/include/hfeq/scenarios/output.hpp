#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hfeq/detection.hpp"
#include "hfeq/fits.hpp"
#include "hfeq/metrics.hpp"
#include "hfeq/spectral.hpp"
#include "json.hpp"

namespace hfeq::scenarios {

// Shortest decimal form that round-trips (std::to_chars).
std::string format_number(double v);

// Column order is fixed: bin_lo,bin_hi,count, preceded by a unit line.
std::string histogram_csv(const CountHistogram& hist);
std::string histogram_csv(const RealHistogram& hist);
// delta_s_ghz,delta_i_ghz,value with detunings from the grid centres.
std::string field_csv(const RealField2D& field);
// delta_ghz,<value_label>
std::string spectrum_csv(const Spectrum1D& spec, const std::string& value_label);
std::string table_csv(const std::vector<std::string>& headers,
                      const std::vector<std::vector<double>>& columns);

// parameter name -> {value, unit, stderr}, plus fit diagnostics.
nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const SchmidtResult& r);
nlohmann::json to_json(const BinDecomposition& d);

// Writes data files into one directory and records them for the manifest.
class OutputSink {
 public:
  explicit OutputSink(std::filesystem::path dir);

  void text(const std::string& name, const std::string& kind, const std::string& description,
            const std::string& content);
  void json(const std::string& name, const std::string& kind, const std::string& description,
            const nlohmann::json& content);

  const std::filesystem::path& dir() const { return dir_; }
  const nlohmann::json& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  nlohmann::json files_ = nlohmann::json::array();
};

}  // namespace hfeq::scenarios
