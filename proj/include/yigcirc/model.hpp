#pragma once

#include "yigcirc/params.hpp"
#include "yigcirc/types.hpp"

namespace yigcirc {

// Anisotropy splitting beta(B) = beta_0 * sech(B / B_0).  Even in B,
// monotonically decaying in |B|.  Returns MHz.
double beta_of_field(const ModelParams& p, double B_mT);

// Field-dependent cavity-circulator couplings g = g0 + g1 * beta(B), MHz.
double coupling_gx(const ModelParams& p, double B_mT);
double coupling_gy(const ModelParams& p, double B_mT);

// 2x2 circulator-mode Hamiltonian in the (x, y) mode basis, entries in GHz.
// Hermitian for all real B; satisfies H(-B) = H^T(B).
CMatrix build_two_mode(const ModelParams& p, double B_mT);

// 4x4 effective Hamiltonian in the basis (cavity 1, cavity 2, y-mode, x-mode),
// entries in GHz.  Loss enters as -i*kappa/2 on the diagonal; satisfies
// H(-B) = H^T(B).
CMatrix build_four_mode(const ModelParams& p, double B_mT);

// Linear magnetization ramp M = B/(mu0*Nz), capped at saturation Ms.
// B in mT, Ms in A/m, result in A/m.  Odd in B up to the cap.
double magnetization_of_field(double B_mT, double Ms, double Nz);

}  // namespace yigcirc
