// Command-line front end: sweeps, circulator figures, fits, and material
// tensors, emitting CSV tables and JSON reports.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "yigcirc/anisotropy.hpp"
#include "yigcirc/eigensystem.hpp"
#include "yigcirc/ferrite.hpp"
#include "yigcirc/fitting.hpp"
#include "yigcirc/io.hpp"
#include "yigcirc/model.hpp"
#include "yigcirc/reduction.hpp"
#include "yigcirc/scattering.hpp"
#include "yigcirc/sweep.hpp"

namespace fs = std::filesystem;
using namespace yigcirc;

namespace {

// Data-file problems get their own exit code (3), unlike config errors (2).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int threads = 1;
  std::string format = "both";  // csv | json | both
};

ModelParams load_model(const GlobalOpts& g) {
  if (g.config_path.empty()) return ModelParams{};
  return load_params(g.config_path);
}

fs::path out_path(const GlobalOpts& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

void write_json_report(const GlobalOpts& g, const std::string& name, Json body) {
  write_text(body.dump(2) + "\n", out_path(g, name).string());
}

Json report_preamble(const ModelParams& p) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config_hash(p)));
  return Json{{"tool_version", kToolVersion}, {"config_hash", hash}};
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// ---- sweep-internal -------------------------------------------------------

struct GridOpts {
  double b_start = -50.0, b_stop = 50.0, b_step = 0.5;
  double w_start = 10.75, w_stop = 10.87;
  int w_count = 241;
};

int cmd_sweep_internal(const GlobalOpts& g, const GridOpts& grid) {
  const ModelParams p = load_model(g);
  const std::vector<double> B = stepped_grid(grid.b_start, grid.b_stop, grid.b_step);

  CsvTable t;
  t.header = standard_header(p);
  t.columns = {"b_mt", "freq1_ghz", "freq2_ghz", "splitting_mhz"};
  for (double b : B) {
    const EigenSystem es = eig_biorthogonal(build_two_mode(p, b));
    const double f1 = es.values[0].real(), f2 = es.values[1].real();
    t.rows.push_back({b, f1, f2, (f2 - f1) * 1e3});
  }
  csv_write(t, out_path(g, "internal_modes.csv").string());
  return 0;
}

// ---- sweep-hybrid ---------------------------------------------------------

int cmd_sweep_hybrid(const GlobalOpts& g, const GridOpts& grid) {
  const ModelParams p = load_model(g);
  const std::vector<double> B = stepped_grid(grid.b_start, grid.b_stop, grid.b_step);
  const std::vector<double> W = linspace(grid.w_start, grid.w_stop, grid.w_count);

  csv_write(eigen_sweep_table(p, eigen_sweep(p, B, g.threads)),
            out_path(g, "eigen_sweep.csv").string());
  csv_write(reduced_sweep_table(p, reduced_sweep(p, B)),
            out_path(g, "reduced_sweep.csv").string());

  const Eigen::MatrixXd map = s31_map(p, B, W, g.threads);
  CsvTable t;
  t.header = standard_header(p);
  t.columns.push_back("b_mt");
  for (double w : W) t.columns.push_back("s31_" + fmt12(w));
  for (int i = 0; i < map.rows(); ++i) {
    std::vector<double> row{B[i]};
    for (int j = 0; j < map.cols(); ++j) row.push_back(map(i, j));
    t.rows.push_back(std::move(row));
  }
  csv_write(t, out_path(g, "s31_map.csv").string());

  if (g.format != "csv") {
    Json report = report_preamble(p);
    Json hs = Json::array();
    for (double b : B) {
      hs.push_back(Json{{"b_mt", b}, {"H", to_json(build_four_mode(p, b))}});
    }
    report["hamiltonians"] = std::move(hs);
    write_json_report(g, "hamiltonians.json", std::move(report));
  }
  return 0;
}

// ---- circulator -----------------------------------------------------------

struct CirculatorOpts {
  double omega0 = 10.8;     // GHz
  double kappa_c = 550.0;   // MHz, mode half-linewidth
  double kappa_i = 0.0;     // MHz
  double delta_min = 100.0, delta_max = 1200.0;
  int delta_count = 56;
  double w_span = 2.0;  // map span in units of kappa_c around omega0
  int w_count = 201;
};

int cmd_circulator(const GlobalOpts& g, const CirculatorOpts& c) {
  const ModelParams p = load_model(g);
  const std::vector<double> deltas = linspace(c.delta_min, c.delta_max, c.delta_count);
  const double half_span = c.w_span * mhz(c.kappa_c);
  const std::vector<double> W =
      linspace(c.omega0 - half_span, c.omega0 + half_span, c.w_count);

  CsvTable t;
  t.header = standard_header(
      p, {{"kappa_c_mhz", fmt12(c.kappa_c)}, {"kappa_i_mhz", fmt12(c.kappa_i)}});
  t.columns.push_back("delta_mhz");
  for (double w : W) t.columns.push_back("iso_db_" + fmt12(w));
  for (double d : deltas) {
    std::vector<double> row{d};
    for (double w : W) {
      const CMatrix S = three_port_circulator(c.omega0, d, c.kappa_c, c.kappa_i, w);
      row.push_back(isolation_db(S(1, 0), S(2, 0)));
    }
    t.rows.push_back(std::move(row));
  }
  csv_write(t, out_path(g, "isolation_map.csv").string());

  const CirculatorWorkingPoint wp = find_working_point(c.omega0, c.kappa_c, c.kappa_i);
  Json report = report_preamble(p);
  report["omega0_ghz"] = c.omega0;
  report["kappa_c_mhz"] = c.kappa_c;
  report["kappa_i_mhz"] = c.kappa_i;
  report["working_point"] = to_json(wp);
  write_json_report(g, "working_point.json", std::move(report));
  return 0;
}

// ---- fit data files -------------------------------------------------------

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_cell(const std::string& s, const std::string& file, int lineno) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw DataError(file + ":" + std::to_string(lineno) +
                    ": bad numeric value '" + s + "'");
  }
}

// Trace CSV: comment header declares "# format = complex" (b_mt, freq_ghz,
// re, im) or "# format = mag_db" (b_mt, freq_ghz, mag_db), one column header
// line, then data rows grouped by field value.
std::vector<SpectrumTrace> load_traces(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file: " + path);
  std::string line, format;
  int lineno = 0;
  bool header_seen = false;
  std::vector<SpectrumTrace> traces;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key, eq, val;
      if (ss >> key >> eq >> val && eq == "=" && key == "format") format = val;
      continue;
    }
    if (!header_seen) {  // column header line
      header_seen = true;
      if (format != "complex" && format != "mag_db") {
        throw DataError(path + ":" + std::to_string(lineno) +
                        ": missing or bad '# format = complex|mag_db' header");
      }
      continue;
    }
    const auto cells = split_csv_line(line);
    const size_t expect = (format == "complex") ? 4 : 3;
    if (cells.size() != expect) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(expect) + " columns, got " +
                      std::to_string(cells.size()));
    }
    const double b = parse_cell(cells[0], path, lineno);
    const double f = parse_cell(cells[1], path, lineno);
    if (traces.empty() || traces.back().b_mt != b) {
      SpectrumTrace t;
      t.b_mt = b;
      t.magnitude_only = (format == "mag_db");
      traces.push_back(std::move(t));
    }
    SpectrumTrace& t = traces.back();
    const int n = static_cast<int>(t.freq_ghz.size());
    t.freq_ghz.conservativeResize(n + 1);
    t.s.conservativeResize(n + 1);
    t.freq_ghz[n] = f;
    if (format == "complex") {
      t.s[n] = Complex(parse_cell(cells[2], path, lineno),
                       parse_cell(cells[3], path, lineno));
    } else {
      t.s[n] = std::pow(10.0, parse_cell(cells[2], path, lineno) / 20.0);
    }
  }
  if (traces.empty()) throw DataError(path + ": no data rows");
  for (const SpectrumTrace& t : traces) {
    try {
      t.validate();
    } catch (const Error& e) {
      throw DataError(path + ": trace at B=" + fmt12(t.b_mt) + " mT: " + e.what());
    }
  }
  return traces;
}

void save_traces(const std::vector<SpectrumTrace>& traces,
                 const std::string& path) {
  std::string out = "# format = complex\nb_mt,freq_ghz,re,im\n";
  for (const SpectrumTrace& t : traces) {
    for (int i = 0; i < t.freq_ghz.size(); ++i) {
      out += fmt12(t.b_mt) + "," + fmt12(t.freq_ghz[i]) + "," +
             fmt12(t.s[i].real()) + "," + fmt12(t.s[i].imag()) + "\n";
    }
  }
  write_text(out, path);
}

// ---- synthesize -----------------------------------------------------------

struct SynthOpts {
  double noise = 0.0;
  double b_skip_below = 0.0;  // drop |B| below this (weak-signal region)
  std::string out_file = "synthetic_sweep.csv";
};

int cmd_synthesize(const GlobalOpts& g, const GridOpts& grid, const SynthOpts& s) {
  const ModelParams p = load_model(g);
  std::vector<double> B = stepped_grid(grid.b_start, grid.b_stop, grid.b_step);
  std::erase_if(B, [&](double b) { return std::abs(b) < s.b_skip_below; });
  if (B.empty()) throw ParseError("synthesize: empty field grid");
  RVector W(grid.w_count);
  const std::vector<double> wv = linspace(grid.w_start, grid.w_stop, grid.w_count);
  for (int i = 0; i < grid.w_count; ++i) W[i] = wv[i];
  save_traces(synthesize_sweep(p, B, W, s.noise, g.seed),
              out_path(g, s.out_file).string());
  return 0;
}

// ---- fit ------------------------------------------------------------------

struct FitOpts {
  std::string data_path;
  std::vector<std::string> free_keys = {"g_x0_mhz", "g_y0_mhz", "kappa_3_mhz"};
  std::vector<std::string> fixed;  // key=value overrides on the initial model
  double noise_level = 0.0;        // known synthetic noise (common random numbers)
  std::uint64_t noise_seed = 0;
};

int cmd_fit(const GlobalOpts& g, const FitOpts& f) {
  ModelParams p = load_model(g);
  std::vector<std::pair<std::string, double>> fixed_report;
  for (const std::string& kv : f.fixed) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ParseError("--fixed expects key=value, got '" + kv + "'");
    }
    const std::string key = kv.substr(0, eq);
    const double val = std::stod(kv.substr(eq + 1));
    p.*param_member(key) = val;
    fixed_report.emplace_back(key, val);
  }

  const std::vector<SpectrumTrace> traces = load_traces(f.data_path);
  const SweepTable table = sweep_extract(traces, g.seed);

  CsvTable t;
  t.header = standard_header(p, {{"data_file", f.data_path}});
  t.columns = {"b_mt", "ok", "rms",
               "freq_a_ghz", "kappa_a_mhz", "amp_a", "phase_a",
               "freq_b_ghz", "kappa_b_mhz", "amp_b", "phase_b"};
  for (size_t i = 0; i < table.size(); ++i) {
    const auto& m = table.modes[i];
    t.rows.push_back({table.B_mt[i], table.ok[i] ? 1.0 : 0.0, table.rms[i],
                      m[0].omega0_ghz, m[0].kappa_mhz, m[0].amplitude, m[0].phase,
                      m[1].omega0_ghz, m[1].kappa_mhz, m[1].amplitude, m[1].phase});
  }
  csv_write(t, out_path(g, "extracted_table.csv").string());

  const GlobalFitResult fit = fit_global_params(table, p, f.free_keys, g.seed, 16,
                                                f.noise_level, f.noise_seed);

  Json report = report_preamble(p);
  report["data_file"] = f.data_path;
  report["seed"] = g.seed;
  report["noise_level"] = f.noise_level;
  report["noise_seed"] = f.noise_seed;
  Json fixed_json = Json::object();
  for (const auto& [key, val] : fixed_report) fixed_json[key] = val;
  report["fixed"] = std::move(fixed_json);
  Json fitted = Json::object();
  for (const std::string& key : f.free_keys) {
    fitted[key] = fit.params.*param_member(key);
  }
  report["fitted"] = std::move(fitted);
  report["rms"] = fit.rms;
  report["iterations"] = fit.iterations;
  report["warnings"] = fit.warnings;
  report["params"] = Json::object();
  for (const std::string& key : param_keys()) {
    report["params"][key] = fit.params.*param_member(key);
  }
  write_json_report(g, "fit_report.json", std::move(report));
  return 0;
}

// ---- ferrite-tensor -------------------------------------------------------

struct FerriteOpts {
  std::string mode = "sandy-green";  // polder | sandy-green | demagnetized | weighted
  double frequency = 10.8;  // GHz
  double ms_oe = 2440.0;
  double gamma = 28.0;  // GHz/T
  double h0 = 0.0;      // internal field, A/m (polder)
  double mp_ratio = 0.0;  // Mp/Ms (sandy-green)
  double delta = 0.0;     // axis weight (weighted)
};

int cmd_ferrite(const GlobalOpts& g, const FerriteOpts& f) {
  const double Ms = oersted_to_si(f.ms_oe);
  const double omega_m = f.gamma * kMu0 * Ms;  // GHz
  PermeabilityTensor mu;
  if (f.mode == "polder") {
    mu = polder_tensor(f.frequency, f.h0, Ms, f.gamma);
  } else if (f.mode == "sandy-green") {
    mu = sandy_green_tensor(f.frequency, f.mp_ratio * Ms, Ms, f.gamma);
  } else if (f.mode == "demagnetized") {
    mu = demagnetized_tensor(f.frequency, omega_m);
  } else if (f.mode == "weighted") {
    mu = anisotropic_weighted_tensor(f.frequency, omega_m, f.delta);
  } else {
    throw ParseError("unknown tensor mode '" + f.mode + "'");
  }

  const ModelParams p = load_model(g);
  if (g.format != "json") {
    CsvTable t;
    t.header = standard_header(
        p, {{"mode", f.mode}, {"frequency_ghz", fmt12(f.frequency)}});
    t.columns = {"row", "col", "re", "im"};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        t.rows.push_back({double(i), double(j), mu(i, j).real(), mu(i, j).imag()});
      }
    }
    csv_write(t, out_path(g, "tensor.csv").string());
  }
  if (g.format != "csv") {
    Json report = report_preamble(p);
    report["mode"] = f.mode;
    report["frequency_ghz"] = f.frequency;
    report["ms_a_per_m"] = Ms;
    report["omega_m_ghz"] = omega_m;
    report["tensor"] = to_json(CMatrix(mu));
    write_json_report(g, "tensor.json", std::move(report));
  }
  return 0;
}

// ---- anisotropy-profile ---------------------------------------------------

struct AnisoOpts {
  double M = 1.0, K = 1.0, T = 0.25;
  double b_start = 0.0, b_stop = 12.0, b_step = 0.5;
};

int cmd_anisotropy(const GlobalOpts& g, const AnisoOpts& a) {
  ToyModelParams tp{a.M, a.K, a.T};
  const std::vector<double> B = stepped_grid(a.b_start, a.b_stop, a.b_step);
  const std::vector<double> D = anisotropy_profile(tp, B);
  const SechFit fit = fit_sech(B, D);

  const ModelParams p = load_model(g);
  CsvTable t;
  t.header = standard_header(p, {{"toy_M", fmt12(a.M)},
                                 {"toy_K", fmt12(a.K)},
                                 {"toy_T", fmt12(a.T)}});
  t.columns = {"b", "d", "sech_fit"};
  for (size_t i = 0; i < B.size(); ++i) {
    t.rows.push_back({B[i], D[i], 1.0 / std::cosh(B[i] / fit.B0)});
  }
  csv_write(t, out_path(g, "anisotropy_profile.csv").string());

  Json report = report_preamble(p);
  report["toy_params"] = Json{{"M", a.M}, {"K", a.K}, {"T", a.T}};
  report["b0"] = fit.B0;
  report["rms"] = fit.rms;
  write_json_report(g, "sech_fit.json", std::move(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"YIG circulator / cavity hybrid model toolkit"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "model parameter file (key = value)");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--seed", g.seed, "RNG seed for fits and noise");
  app.add_option("--threads", g.threads, "worker threads for field sweeps")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "csv | json | both")
      ->check(CLI::IsMember({"csv", "json", "both"}));

  GridOpts grid;
  auto add_b_grid = [&](CLI::App* sub) {
    sub->add_option("--b-start", grid.b_start, "field grid start, mT");
    sub->add_option("--b-stop", grid.b_stop, "field grid stop, mT");
    sub->add_option("--b-step", grid.b_step, "field grid step, mT");
  };
  auto add_w_grid = [&](CLI::App* sub) {
    sub->add_option("--omega-start", grid.w_start, "frequency grid start, GHz");
    sub->add_option("--omega-stop", grid.w_stop, "frequency grid stop, GHz");
    sub->add_option("--omega-count", grid.w_count, "frequency grid points")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* si = app.add_subcommand("sweep-internal",
                                    "two-mode eigenfrequencies vs field");
  add_b_grid(si);

  CLI::App* sh = app.add_subcommand(
      "sweep-hybrid", "four-mode eigen-sweep, |S31| map, reduced model");
  add_b_grid(sh);
  add_w_grid(sh);

  CirculatorOpts co;
  CLI::App* ci = app.add_subcommand("circulator",
                                    "three-port isolation map and working point");
  ci->add_option("--omega0", co.omega0, "center frequency, GHz");
  ci->add_option("--kappa-c", co.kappa_c, "mode half-linewidth, MHz");
  ci->add_option("--kappa-i", co.kappa_i, "internal loss, MHz");
  ci->add_option("--delta-min", co.delta_min, "splitting grid start, MHz");
  ci->add_option("--delta-max", co.delta_max, "splitting grid stop, MHz");
  ci->add_option("--delta-count", co.delta_count, "splitting grid points")
      ->check(CLI::PositiveNumber);
  ci->add_option("--omega-count", co.w_count, "frequency grid points")
      ->check(CLI::PositiveNumber);

  SynthOpts so;
  CLI::App* sy = app.add_subcommand("synthesize",
                                    "model-generated S31 trace dataset");
  add_b_grid(sy);
  add_w_grid(sy);
  sy->add_option("--noise", so.noise, "noise RMS as fraction of trace max");
  sy->add_option("--b-skip-below", so.b_skip_below,
                 "drop field points with |B| below this, mT");
  sy->add_option("--out-file", so.out_file, "dataset file name");

  FitOpts fo;
  CLI::App* fi = app.add_subcommand("fit", "extract + global fit on trace data");
  fi->add_option("--data", fo.data_path, "trace CSV path")->required();
  fi->add_option("--free", fo.free_keys, "free parameter keys")->delimiter(',');
  fi->add_option("--fixed", fo.fixed, "key=value overrides held fixed");
  fi->add_option("--noise-level", fo.noise_level,
                 "known synthetic noise fraction (matched-noise fitting)");
  fi->add_option("--noise-seed", fo.noise_seed, "seed the dataset was drawn with");

  FerriteOpts fe;
  CLI::App* ft = app.add_subcommand("ferrite-tensor", "permeability tensors");
  ft->add_option("--mode", fe.mode,
                 "polder | sandy-green | demagnetized | weighted");
  ft->add_option("--frequency", fe.frequency, "drive frequency, GHz");
  ft->add_option("--ms-oe", fe.ms_oe, "saturation magnetization, Oe");
  ft->add_option("--gamma", fe.gamma, "gyromagnetic ratio, GHz/T");
  ft->add_option("--h0", fe.h0, "internal field, A/m (polder)");
  ft->add_option("--mp-ratio", fe.mp_ratio, "Mp/Ms (sandy-green)");
  ft->add_option("--delta", fe.delta, "axis weight (weighted)");

  AnisoOpts ao;
  CLI::App* an = app.add_subcommand("anisotropy-profile",
                                    "Boltzmann toy-model decay profile");
  an->add_option("--toy-m", ao.M, "net moment (reduced units)");
  an->add_option("--toy-k", ao.K, "anisotropy energy (reduced units)");
  an->add_option("--toy-t", ao.T, "temperature (reduced units)");
  an->add_option("--b-start", ao.b_start, "field grid start");
  an->add_option("--b-stop", ao.b_stop, "field grid stop");
  an->add_option("--b-step", ao.b_step, "field grid step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (si->parsed()) return cmd_sweep_internal(g, grid);
    if (sh->parsed()) return cmd_sweep_hybrid(g, grid);
    if (ci->parsed()) return cmd_circulator(g, co);
    if (sy->parsed()) return cmd_synthesize(g, grid, so);
    if (fi->parsed()) return cmd_fit(g, fo);
    if (ft->parsed()) return cmd_ferrite(g, fe);
    if (an->parsed()) return cmd_anisotropy(g, ao);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
