#pragma once

#include <vector>

#include "yigcirc/eigensystem.hpp"
#include "yigcirc/types.hpp"

namespace yigcirc {

// Two-cavity effective Hamiltonian obtained by adiabatically integrating out
// the circulator block: H' = A + B (wbar*I - D)^{-1} C, entries in GHz.
struct ReducedModel {
  CMatrix H;            // 2x2
  Complex h12, h21;     // off-diagonal couplings, GHz
  double r = 1.0;       // sqrt(|H21|/|H12|)
  bool degenerate = false;  // either off-diagonal negligible; r reported as 1
  double omega_bar = 0.0;   // evaluation frequency, GHz

  double h12_mhz() const { return std::abs(h12) * 1e3; }
  double h21_mhz() const { return std::abs(h21) * 1e3; }
};

// Partition H4 as [[A, B], [C, D]] with A the 2x2 cavity block.  The default
// evaluation frequency is the mean of the two cavity diagonal frequencies.
ReducedModel adiabatic_eliminate(const CMatrix& H4);
ReducedModel adiabatic_eliminate(const CMatrix& H4, double omega_bar);

// Similarity transform S = diag(sqrt(r), 1/sqrt(r)) mapping the reduced
// Hamiltonian to a reciprocal one with |H12| == |H21|.
struct SimilarityResult {
  CMatrix H_rec;  // 2x2, reciprocal
  double r;
};

SimilarityResult similarity_analysis(const ReducedModel& rm);

// Classification of each reduced eigenmode against the two limits of the
// amplitude-ratio formula: R ~ 1 (site-1 dominated) or R ~ r^2 (site-2
// dominated).
enum class RLimitClass { NearUnity, NearRSquared };

struct RLimitEntry {
  double component_ratio;  // |x/y| of the reciprocal eigenvector
  double R_predicted;      // exact value of the transformed ratio
  RLimitClass cls;
};

std::vector<RLimitEntry> r_limit_check(const ReducedModel& rm,
                                       const EigenSystem& es2);

}  // namespace yigcirc
