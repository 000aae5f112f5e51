#pragma once

#include <map>
#include <string>
#include <vector>

#include "yigcirc/types.hpp"

namespace yigcirc {

// Full parameter set of the two-mode and four-mode circulator Hamiltonians.
// Conventions: all frequencies are linear frequency (omega/2pi) in GHz,
// linewidths and couplings in MHz, magnetic fields in mT.
struct ModelParams {
  double omega_x = 10.707;   // x circulator mode frequency, GHz
  double omega_y = 10.813;   // y circulator mode frequency, GHz
  double omega_1 = 10.8104;  // cavity 1 frequency, GHz
  double omega_2 = 10.8040;  // cavity 2 frequency, GHz

  // Port 1/2 are weakly coupled drive ports; their couplings only scale
  // spectral amplitudes, never the frequency/linewidth structure.
  double kappa_1 = 0.1;   // cavity 1 input coupling, MHz (full linewidth)
  double kappa_2 = 0.1;   // cavity 2 input coupling, MHz (full linewidth)
  double kappa_3 = 730.0; // y-mode decay to the waveguide port, MHz
  double kappa_x = 0.0;   // optional x-mode loss, MHz (model extension)

  double k = 9.82;     // chiral coupling slope, GHz/T
  double m = 50.0;     // quadratic magnon-repulsion coefficient, GHz/T^2
  double beta_0 = 139.0;  // zero-field anisotropy splitting, MHz
  double B_0 = 18.5;      // anisotropy decay field scale, mT
  double theta_deg = 37.7;  // in-plane anisotropy axis angle, degrees

  // Field-dependent coupling law g(B) = g0 + g1 * beta(B), in MHz with
  // beta expressed in MHz (g1 dimensionless).
  double g_x0 = 9.0;
  double g_x1 = 0.011;
  double g_y0 = 5.0;
  double g_y1 = 0.006;

  void validate() const;
};

// Flat key-value config file support (keys carry unit suffixes, e.g.
// "omega_x_ghz = 11.054").  Unknown keys are rejected.
ModelParams load_params(const std::string& path);
ModelParams parse_params(const std::string& text, const std::string& origin = "<string>");
std::string serialize_params(const ModelParams& p);
void save_params(const ModelParams& p, const std::string& path);

// Member lookup by config key (e.g. "g_x0_mhz"); throws ParseError for
// unknown keys.
double ModelParams::* param_member(const std::string& key);
std::vector<std::string> param_keys();

// Generic flat key=value parsing, shared with run configs.
std::map<std::string, std::string> parse_flat_config(const std::string& text,
                                                     const std::string& origin);

}  // namespace yigcirc
