#pragma once

#include "yigcirc/types.hpp"

namespace yigcirc {

// Material parameters for the ferrite permeability formulas.  Internal math
// is SI; magnetization values quoted in Oe convert via oersted_to_si.
struct FerriteParams {
  double Ms = 0.0;     // saturation magnetization, A/m
  double gamma = 28.0; // gyromagnetic ratio, GHz/T
  double Nx = 1.0 / 3.0, Ny = 1.0 / 3.0, Nz = 1.0 / 3.0;  // demag factors

  void validate() const;
};

// 1 Oe = 1e3/(4*pi) A/m.
double oersted_to_si(double oe);

using PermeabilityTensor = Eigen::Matrix3cd;

// Kittel formula: f = gamma * [B + mu0 (N_xy - Nz) Ms], B in mT, result GHz.
// N_xy is the mean of Nx and Ny.
double kittel_frequency(const FerriteParams& p, double B_mT);

// Saturated Polder tensor; H0 is the internal field in A/m.
PermeabilityTensor polder_tensor(double omega_ghz, double H0, double Ms,
                                 double gamma);

// Sandy-Green partially magnetized tensor; Mp is the net magnetization.
// Requires omega > omega_m (else the demagnetized permeability turns
// complex).  The gyrotropic entry is kappa_p = -(omega_m/omega) * Mp/Ms.
PermeabilityTensor sandy_green_tensor(double omega_ghz, double Mp, double Ms,
                                      double gamma);

// Fully demagnetized tensor for z-aligned zero-net domains:
// diag(mu_eff, mu_eff, 1) with mu_eff = sqrt((omega^2 - omega_m^2)/omega^2).
PermeabilityTensor demagnetized_tensor(double omega_ghz, double omega_m_ghz);

// Anisotropy-weighted average (1/3+delta)[mu]_x + (1/3-delta)[mu]_y +
// (1/3)[mu]_z of axis-permuted demagnetized tensors.  |delta| <= 1/3.
PermeabilityTensor anisotropic_weighted_tensor(double omega_ghz,
                                               double omega_m_ghz,
                                               double delta);

}  // namespace yigcirc
