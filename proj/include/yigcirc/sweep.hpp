#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "yigcirc/eigensystem.hpp"
#include "yigcirc/fitting.hpp"
#include "yigcirc/params.hpp"
#include "yigcirc/reduction.hpp"
#include "yigcirc/scattering.hpp"

namespace yigcirc {

// Deterministic parallel loop: fn(i) for i in [0, n), results must be
// written into pre-sized storage indexed by i.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

std::vector<double> linspace(double start, double stop, int count);
std::vector<double> stepped_grid(double start, double stop, double step);

// The two prominent eigenmodes of the S31 decomposition: indices into `es`,
// ordered (a, b) with mode a the one with the larger cavity-1 right-vector
// weight.
std::pair<int, int> prominent_modes(const EigenSystem& es,
                                    const LorentzianSet& s31_components);

// Per-field eigenmode record for the four-mode system.
struct EigenSweepRow {
  double B_mt = 0.0;
  int label = 0;  // tracked label, continuous across the sweep
  double freq_ghz = 0.0;
  double kappa_mhz = 0.0;
  double amplitude = 0.0;  // S31 Lorentzian amplitude
  double phase = 0.0;
  double R1 = 0.0;  // non-reciprocity ratio vs bare cavity 1
  double Ry = 0.0;  // vs the y circulator mode
  double amp_ratio = 0.0;  // eigenvector amplitude-ratio identity at this B
  bool flagged = false;    // near-defective or ambiguous tracking
};

std::vector<EigenSweepRow> eigen_sweep(const ModelParams& p,
                                       const std::vector<double>& B_grid,
                                       int threads = 1);

// Reduced-model record per field point.
struct ReducedRow {
  double B_mt = 0.0;
  double h12_mhz = 0.0;
  double h21_mhz = 0.0;
  double r = 1.0;
  Complex eig1, eig2;  // eigenvalues of the reduced Hamiltonian, GHz
};

std::vector<ReducedRow> reduced_sweep(const ModelParams& p,
                                      const std::vector<double>& B_grid);

// |S31|(B, omega) map; rows follow B_grid, columns omega_grid.
Eigen::MatrixXd s31_map(const ModelParams& p, const std::vector<double>& B_grid,
                        const std::vector<double>& omega_grid, int threads = 1);

// Working point search for the ideal three-port circulator: the splitting
// delta* maximizing isolation at the center frequency, plus the 20 dB
// bandwidth and insertion loss there.
struct CirculatorWorkingPoint {
  double delta_star_mhz = 0.0;
  double bandwidth_20db_mhz = 0.0;
  double insertion_loss = 0.0;
  double isolation_db = 0.0;
};

CirculatorWorkingPoint find_working_point(double omega0_ghz, double kappa_c_mhz,
                                          double kappa_i_mhz);

}  // namespace yigcirc
