#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "yigcirc/eigensystem.hpp"
#include "yigcirc/params.hpp"
#include "yigcirc/reduction.hpp"
#include "yigcirc/scattering.hpp"
#include "yigcirc/sweep.hpp"

namespace yigcirc {

using Json = nlohmann::ordered_json;

// FNV-1a over the canonical serialized parameter block; stamped into every
// output so results can be traced back to the exact configuration.
std::uint64_t config_hash(const ModelParams& p);

extern const char* kToolVersion;

// CSV with "# key = value" comment header lines.  Numeric cells use %.12g.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> header;  // comment block
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string csv_format(const CsvTable& table);
void csv_write(const CsvTable& table, const std::string& path);

// Standard comment header: tool version + config hash + extras.
std::vector<std::pair<std::string, std::string>> standard_header(
    const ModelParams& p,
    std::vector<std::pair<std::string, std::string>> extra = {});

Json to_json(const Complex& z);  // [re, im]
Json to_json(const CMatrix& m);
Json to_json(const EigenSystem& es);
Json to_json(const LorentzianSet& set);
Json to_json(const ReducedModel& rm);
Json to_json(const CirculatorWorkingPoint& wp);

CsvTable eigen_sweep_table(const ModelParams& p,
                           const std::vector<EigenSweepRow>& rows);
CsvTable reduced_sweep_table(const ModelParams& p,
                             const std::vector<ReducedRow>& rows);

void write_text(const std::string& text, const std::string& path);

}  // namespace yigcirc
