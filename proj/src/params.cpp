#include "yigcirc/params.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace yigcirc {

void ModelParams::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw DomainError(std::string("invalid parameters: ") + msg);
  };
  require(kappa_1 >= 0 && kappa_2 >= 0 && kappa_3 >= 0 && kappa_x >= 0,
          "linewidths must be >= 0");
  require(beta_0 >= 0, "beta_0 must be >= 0");
  require(B_0 > 0, "B_0 must be > 0");
  for (double v : {omega_x, omega_y, omega_1, omega_2, kappa_1, kappa_2,
                   kappa_3, kappa_x, k, m, beta_0, B_0, theta_deg, g_x0, g_x1,
                   g_y0, g_y1}) {
    require(std::isfinite(v), "all parameters must be finite");
  }
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

using FieldMap = std::vector<std::pair<std::string, double ModelParams::*>>;

const FieldMap& field_map() {
  static const FieldMap map = {
      {"omega_x_ghz", &ModelParams::omega_x},
      {"omega_y_ghz", &ModelParams::omega_y},
      {"omega_1_ghz", &ModelParams::omega_1},
      {"omega_2_ghz", &ModelParams::omega_2},
      {"kappa_1_mhz", &ModelParams::kappa_1},
      {"kappa_2_mhz", &ModelParams::kappa_2},
      {"kappa_3_mhz", &ModelParams::kappa_3},
      {"kappa_x_mhz", &ModelParams::kappa_x},
      {"k_ghz_per_t", &ModelParams::k},
      {"m_ghz_per_t2", &ModelParams::m},
      {"beta_0_mhz", &ModelParams::beta_0},
      {"b_0_mt", &ModelParams::B_0},
      {"theta_deg", &ModelParams::theta_deg},
      {"g_x0_mhz", &ModelParams::g_x0},
      {"g_x1", &ModelParams::g_x1},
      {"g_y0_mhz", &ModelParams::g_y0},
      {"g_y1", &ModelParams::g_y1},
  };
  return map;
}

}  // namespace

std::map<std::string, std::string> parse_flat_config(const std::string& text,
                                                     const std::string& origin) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParseError(origin + ":" + std::to_string(lineno) +
                       ": expected 'key = value', got '" + t + "'");
    }
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty() || val.empty()) {
      throw ParseError(origin + ":" + std::to_string(lineno) +
                       ": empty key or value");
    }
    if (out.count(key)) {
      throw ParseError(origin + ":" + std::to_string(lineno) +
                       ": duplicate key '" + key + "'");
    }
    out[key] = val;
  }
  return out;
}

ModelParams parse_params(const std::string& text, const std::string& origin) {
  auto kv = parse_flat_config(text, origin);
  ModelParams p;
  for (const auto& [key, member] : field_map()) {
    auto it = kv.find(key);
    if (it == kv.end()) continue;
    try {
      size_t pos = 0;
      p.*member = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(origin + ": bad numeric value for '" + key + "': " +
                       it->second);
    }
    kv.erase(it);
  }
  if (!kv.empty()) {
    throw ParseError(origin + ": unknown key '" + kv.begin()->first + "'");
  }
  p.validate();
  return p;
}

ModelParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_params(ss.str(), path);
}

std::string serialize_params(const ModelParams& p) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& [key, member] : field_map()) {
    out << key << " = " << p.*member << "\n";
  }
  return out.str();
}

double ModelParams::* param_member(const std::string& key) {
  for (const auto& [name, member] : field_map()) {
    if (name == key) return member;
  }
  throw ParseError("unknown parameter key '" + key + "'");
}

std::vector<std::string> param_keys() {
  std::vector<std::string> out;
  for (const auto& [name, member] : field_map()) out.push_back(name);
  return out;
}

void save_params(const ModelParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write config file: " + path);
  out << serialize_params(p);
}

}  // namespace yigcirc
