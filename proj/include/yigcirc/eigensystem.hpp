#pragma once

#include <vector>

#include "yigcirc/params.hpp"
#include "yigcirc/types.hpp"

namespace yigcirc {

// Biorthogonal eigensystem of a non-Hermitian matrix.  Columns of `right`
// and `left` are paired: left.col(n).adjoint() * right.col(m) == delta_nm.
// Eigenvalues are complex frequencies in GHz; Re = mode frequency,
// -2*Im = full linewidth.
struct EigenSystem {
  CVector values;
  CMatrix right;
  CMatrix left;
  bool near_defective = false;  // min pairwise eigenvalue gap < 1e-9 GHz
  double min_gap = 0.0;

  int size() const { return static_cast<int>(values.size()); }

  double biorthogonality_error() const;  // max |<nL|mR> - delta_nm|
  double completeness_error() const;     // max-norm of sum |nR><nL| - I
};

// Diagonalize H; left vectors come from a separate eigendecomposition of
// H^dagger, paired to right vectors by eigenvalue conjugation (pairing
// tolerance 1e-8 GHz).  Modes are sorted by (Re, Im) of the eigenvalue.
// Gauge: largest-|component| of each right vector is real positive,
// right vectors have unit 2-norm, left vectors scaled so <nL|nR> = 1.
EigenSystem eig_biorthogonal(const CMatrix& H);

// Non-reciprocity ratio R_{i,n} = |<n_L|i>| / |<i|n_R>| with both vectors
// normalized to unit 2-norm.  Equals 1 for Hermitian H.
double r_ratio(const EigenSystem& es, int bare_index, int mode);

// Lorentzian amplitude-ratio identity A_n(B)/A_n(-B) evaluated from the
// eigenvectors at field B: |<nL|1><y|nR> / (<1|nR><nL|y>)| = R_{1,n}/R_{y,n}.
// `mode` indexes the eigensystem of build_four_mode(p, B).
double amplitude_ratio(const ModelParams& p, double B_mT, int mode);

// Mode tracking across an ordered sweep by greedy best right-vector overlap.
struct TrackResult {
  // assignment[i][label] = mode index at sweep point i carrying this label.
  std::vector<std::vector<int>> assignment;
  // ambiguous[i] = best and second-best overlap differed by < 0.1 somewhere
  // in the assignment at point i.
  std::vector<bool> ambiguous;
};

TrackResult track_modes(const std::vector<EigenSystem>& sweep);

}  // namespace yigcirc
