#pragma once

#include <functional>
#include <vector>

#include "yigcirc/types.hpp"

namespace yigcirc {

// Boltzmann toy model of a magnetic domain with an in-plane easy axis:
// H_an = -B*M*cos(theta) - K*sin^2(theta)*cos^2(phi).  Only the reduced
// ratios B*M/(kb*T) and K/(kb*T) matter; M, K, T share one energy unit
// with kb = 1.
struct ToyModelParams {
  double M = 1.0;  // net moment
  double K = 0.0;  // anisotropy energy
  double T = 1.0;  // temperature

  void validate() const;
};

// Nested adaptive Simpson quadrature of f over [a, b], relative tolerance
// `tol`.  Deterministic; throws on non-convergence.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 48);

// Partition function Z = int_0^pi int_0^2pi exp(-H_an/kbT) sin(theta).
double partition_function(const ToyModelParams& p, double B);

struct MomentExpectations {
  double mx2, my2, mz2;  // <Mx^2>, <My^2>, <Mz^2>; sum = M^2
  double mz;             // <Mz>
};

MomentExpectations moment_expectations(const ToyModelParams& p, double B);

// Normalized anisotropy decay profile
// D(B) = (<Mx^2> - <My^2>)(B) / (<Mx^2> - <My^2>)(0).  Requires K > 0.
std::vector<double> anisotropy_profile(const ToyModelParams& p,
                                       const std::vector<double>& B_grid);

// One-parameter least-squares fit of sech(B/B0) to a profile.
struct SechFit {
  double B0;
  double rms;
};

SechFit fit_sech(const std::vector<double>& B, const std::vector<double>& D);

}  // namespace yigcirc
