#include "yigcirc/io.hpp"

#include <cstdio>
#include <fstream>

namespace yigcirc {

const char* kToolVersion = "1.0.0";

std::uint64_t config_hash(const ModelParams& p) {
  const std::string text = serialize_params(p);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string csv_format(const CsvTable& table) {
  std::string out;
  for (const auto& [key, val] : table.header) {
    out += "# " + key + " = " + val + "\n";
  }
  for (size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ",";
    out += table.columns[i];
  }
  out += "\n";
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += fmt_num(row[i]);
    }
    out += "\n";
  }
  return out;
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write output file: " + path);
  out << text;
}

void csv_write(const CsvTable& table, const std::string& path) {
  write_text(csv_format(table), path);
}

std::vector<std::pair<std::string, std::string>> standard_header(
    const ModelParams& p,
    std::vector<std::pair<std::string, std::string>> extra) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config_hash(p)));
  std::vector<std::pair<std::string, std::string>> out = {
      {"tool_version", kToolVersion},
      {"config_hash", hash},
  };
  for (auto& kv : extra) out.push_back(std::move(kv));
  return out;
}

Json to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const EigenSystem& es) {
  Json values = Json::array();
  for (int n = 0; n < es.size(); ++n) values.push_back(to_json(es.values[n]));
  return Json{{"values_ghz", std::move(values)},
              {"right", to_json(es.right)},
              {"left", to_json(es.left)},
              {"near_defective", es.near_defective},
              {"min_gap_ghz", es.min_gap}};
}

Json to_json(const LorentzianSet& set) {
  Json arr = Json::array();
  for (const Lorentzian& l : set) {
    arr.push_back(Json{{"amplitude", l.amplitude},
                       {"phase_rad", l.phase},
                       {"omega0_ghz", l.omega0_ghz},
                       {"kappa_mhz", l.kappa_mhz}});
  }
  return arr;
}

Json to_json(const ReducedModel& rm) {
  return Json{{"H", to_json(rm.H)},
              {"h12_mhz", rm.h12_mhz()},
              {"h21_mhz", rm.h21_mhz()},
              {"r", rm.r},
              {"omega_bar_ghz", rm.omega_bar},
              {"degenerate", rm.degenerate}};
}

Json to_json(const CirculatorWorkingPoint& wp) {
  return Json{{"delta_star_mhz", wp.delta_star_mhz},
              {"bandwidth_20db_mhz", wp.bandwidth_20db_mhz},
              {"insertion_loss", wp.insertion_loss},
              {"isolation_db", wp.isolation_db}};
}

CsvTable eigen_sweep_table(const ModelParams& p,
                           const std::vector<EigenSweepRow>& rows) {
  CsvTable t;
  t.header = standard_header(p);
  t.columns = {"b_mt",  "label",     "freq_ghz", "kappa_mhz", "amplitude",
               "phase", "r_cavity1", "r_ymode",  "amp_ratio", "flagged"};
  t.rows.reserve(rows.size());
  for (const EigenSweepRow& r : rows) {
    t.rows.push_back({r.B_mt, static_cast<double>(r.label), r.freq_ghz,
                      r.kappa_mhz, r.amplitude, r.phase, r.R1, r.Ry,
                      r.amp_ratio, r.flagged ? 1.0 : 0.0});
  }
  return t;
}

CsvTable reduced_sweep_table(const ModelParams& p,
                             const std::vector<ReducedRow>& rows) {
  CsvTable t;
  t.header = standard_header(p);
  t.columns = {"b_mt",         "h12_mhz",      "h21_mhz",
               "r",            "eig1_re_ghz",  "eig1_im_ghz",
               "eig2_re_ghz",  "eig2_im_ghz"};
  t.rows.reserve(rows.size());
  for (const ReducedRow& r : rows) {
    t.rows.push_back({r.B_mt, r.h12_mhz, r.h21_mhz, r.r, r.eig1.real(),
                      r.eig1.imag(), r.eig2.real(), r.eig2.imag()});
  }
  return t;
}

}  // namespace yigcirc
