#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "yigcirc/params.hpp"
#include "yigcirc/scattering.hpp"
#include "yigcirc/types.hpp"

namespace yigcirc {

// One measured (or synthesized) transmission trace at a fixed field.
struct SpectrumTrace {
  RVector freq_ghz;          // strictly increasing, >= 32 points
  CVector s;                 // complex S values (imag ignored if magnitude_only)
  bool magnitude_only = false;
  double b_mt = 0.0;

  void validate() const;
};

struct LorentzianFitResult {
  LorentzianSet set;  // 2 components, sorted by frequency
  Complex background{0.0, 0.0};  // complex constant absorbing broad-mode tails
  double rms = 0.0;
  bool converged = false;
};

// Peak-based initial guess for a two-Lorentzian fit.
LorentzianSet guess_two_peaks(const SpectrumTrace& trace);

// Nonlinear least squares of two Lorentzians plus a complex constant
// background against complex data (or squared magnitudes when the trace is
// magnitude-only), with multi-start refinement.  The background term absorbs
// the slowly varying tails of any broad out-of-window resonances, which
// would otherwise bias the weaker fitted amplitude.  Throws FitError on
// non-convergence or mode collapse (fitted frequencies within 1e-4 GHz).
LorentzianFitResult fit_two_lorentzians(const SpectrumTrace& trace,
                                        const LorentzianSet& guess,
                                        std::uint64_t seed = 1);

// Model-generated S31 traces over a field grid with optional complex
// Gaussian noise (RMS = noise_level * trace max magnitude).  Deterministic
// for a fixed seed; per-trace RNG streams are derived from it.
std::vector<SpectrumTrace> synthesize_sweep(const ModelParams& p,
                                            const std::vector<double>& B_grid,
                                            const RVector& omega_grid,
                                            double noise_level,
                                            std::uint64_t seed);

// Per-field two-Lorentzian fit results, mode-tracked by frequency
// continuity.  Failed points are flagged, never interpolated.
struct SweepTable {
  std::vector<double> B_mt;
  std::vector<std::array<Lorentzian, 2>> modes;
  std::vector<bool> ok;
  std::vector<double> rms;
  RVector freq_ghz;  // common trace grid; lets the global fit mirror the
                     // same truncated two-Lorentzian description

  size_t size() const { return B_mt.size(); }
};

SweepTable sweep_extract(const std::vector<SpectrumTrace>& traces,
                         std::uint64_t seed = 1);

// Model-side prediction of the two prominent Lorentzians of S31 at field B
// (the two largest-amplitude eigenmode components), sorted by frequency.
std::array<Lorentzian, 2> predict_prominent_pair(const ModelParams& p, double B_mT);

struct GlobalFitResult {
  ModelParams params;
  double rms = 0.0;
  int iterations = 0;
  std::vector<std::string> warnings;  // identifiability flags etc.
};

// Weighted least squares of the extracted {omega, kappa, A} tables against
// the four-mode model, over the designated free parameters (config keys,
// e.g. "g_x0_mhz").  Multi-start local optimization, monotone acceptance.
// The model-side predictions go through the same truncated two-Lorentzian
// refit as the data.  For synthetic datasets whose noise level and seed are
// known, passing them here applies the identical noise stream to the model
// traces (common random numbers), cancelling the extraction bias of the
// noisy pipeline at the true parameters.
GlobalFitResult fit_global_params(const SweepTable& table,
                                  const ModelParams& initial,
                                  const std::vector<std::string>& free_keys,
                                  std::uint64_t seed = 1, int n_starts = 16,
                                  double noise_level = 0.0,
                                  std::uint64_t noise_seed = 0);

}  // namespace yigcirc
