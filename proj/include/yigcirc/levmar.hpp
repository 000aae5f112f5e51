#pragma once

#include <cstdint>
#include <functional>

#include "yigcirc/types.hpp"

namespace yigcirc {

// Residual vector as a function of the parameter vector; the objective is
// 0.5 * ||r||^2.
using ResidualFn = std::function<RVector(const RVector&)>;

struct LevMarOptions {
  int max_iterations = 300;
  double cost_tol = 1e-14;   // relative cost decrease considered converged
  double step_tol = 1e-13;   // relative parameter step considered converged
  double lambda0 = 1e-3;
  double jacobian_h = 1e-7;  // forward-difference step, relative to max(1, |p|)
};

struct LevMarResult {
  RVector params;
  double rms = 0.0;      // sqrt(mean squared residual)
  bool converged = false;
  int iterations = 0;
  Eigen::MatrixXd jtj;   // J^T J at the solution (curvature diagnostics)
};

// Damped Gauss-Newton with a forward-difference Jacobian and monotone step
// acceptance.
LevMarResult levmar(const ResidualFn& fn, RVector p0,
                    const LevMarOptions& opts = {});

// Runs levmar from p0 and from (n_starts - 1) perturbed starts drawn
// uniformly from +-spread around p0 (fixed seed), keeping the lowest cost.
LevMarResult multistart_levmar(const ResidualFn& fn, const RVector& p0,
                               const RVector& spread, int n_starts,
                               std::uint64_t seed,
                               const LevMarOptions& opts = {});

}  // namespace yigcirc
