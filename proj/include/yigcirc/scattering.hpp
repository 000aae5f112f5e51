#pragma once

#include <vector>

#include "yigcirc/eigensystem.hpp"
#include "yigcirc/params.hpp"
#include "yigcirc/types.hpp"

namespace yigcirc {

// External port: which bare mode it couples to and with what full linewidth.
struct Port {
  int mode_index = 0;
  double kappa_mhz = 0.0;
};
using PortMap = std::vector<Port>;

// Standard port map for the four-mode system: two weak cavity probes and the
// waveguide port on the y-mode.
PortMap four_mode_ports(const ModelParams& p);

// One term of the Lorentzian spectral decomposition.  Reconstruction is
// sum_n A_n e^{i phi_n} / (omega - omega_n) with omega_n = omega0 - i*kappa/2.
struct Lorentzian {
  double amplitude = 0.0;   // A_n >= 0
  double phase = 0.0;       // phi_n, rad
  double omega0_ghz = 0.0;  // Re omega_n
  double kappa_mhz = 0.0;   // -2 Im omega_n
};
using LorentzianSet = std::vector<Lorentzian>;

Complex lorentzian_eval(const LorentzianSet& set, double omega_ghz);

// Retarded Green's function G(omega) = (omega*I - H)^{-1}.
CMatrix greens_function(const CMatrix& H, double omega_ghz);

// Input-output scattering matrix over the mapped ports:
// S_ij = delta_ij - i sqrt(kappa_i kappa_j) G_ij(omega).
CMatrix s_matrix(const CMatrix& H, const PortMap& ports, double omega_ghz);

// Per-eigenmode decomposition of S_{out,in}(omega).
LorentzianSet lorentzian_decomposition(const CMatrix& H, const PortMap& ports,
                                       int out_port, int in_port);
LorentzianSet lorentzian_decomposition(const EigenSystem& es, const PortMap& ports,
                                       int out_port, int in_port);

// Self-calibrated isolation 20*log10 |S_ij(B) / S_ij(-B)| in dB, clamped to
// +-120 dB.  The two S values are supplied by the caller.
double isolation_db(Complex s_plus, Complex s_minus);

// Ideal three-port circulator built from two counter-rotating internal modes
// at omega0 +- delta/2.  kappa_c is each mode's external HALF-linewidth (the
// working condition is delta = 2*kappa_c/sqrt(3)); per-port full coupling is
// 2*kappa_c/3.  kappa_i is the internal full linewidth.  chirality = +-1
// selects the circulation direction (+1 circulates 1 -> 2 -> 3 -> 1).
CMatrix three_port_circulator(double omega0_ghz, double delta_mhz,
                              double kappa_c_mhz, double kappa_i_mhz,
                              double omega_ghz, int chirality = +1);

// kappa_3 of the four-mode model from the loaded-circulator kappa_c.
inline double kappa3_from_kappa_c(double kappa_c_mhz) {
  return 4.0 * kappa_c_mhz / 3.0;
}

// Insertion-loss figures from a 3x3 S-matrix at the working point.
struct InsertionLoss {
  double loss;   // 1 - |S21|^2
  double bound;  // 1 - |S21|^2 - |S11|^2 - |S31|^2  (~ kappa_i / kappa_c)
};

InsertionLoss insertion_loss(const CMatrix& S);

}  // namespace yigcirc
