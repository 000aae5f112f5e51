#include "yigcirc/levmar.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace yigcirc {

namespace {

Eigen::MatrixXd numeric_jacobian(const ResidualFn& fn, const RVector& p,
                                 const RVector& r0, double h_rel) {
  const int np = static_cast<int>(p.size());
  const int nr = static_cast<int>(r0.size());
  Eigen::MatrixXd J(nr, np);
  for (int j = 0; j < np; ++j) {
    const double h = h_rel * std::max(1.0, std::abs(p[j]));
    RVector pj = p;
    pj[j] += h;
    J.col(j) = (fn(pj) - r0) / h;
  }
  return J;
}

}  // namespace

LevMarResult levmar(const ResidualFn& fn, RVector p0, const LevMarOptions& opts) {
  LevMarResult res;
  RVector p = std::move(p0);
  RVector r = fn(p);
  if (!r.allFinite()) throw FitError("levmar: non-finite residual at start");
  double cost = 0.5 * r.squaredNorm();
  double lambda = opts.lambda0;

  const int np = static_cast<int>(p.size());
  Eigen::MatrixXd J = numeric_jacobian(fn, p, r, opts.jacobian_h);

  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    const Eigen::MatrixXd jtj = J.transpose() * J;
    const RVector g = J.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() < 1e-15) {
      res.converged = true;
      break;
    }

    bool accepted = false;
    for (int tries = 0; tries < 24 && !accepted; ++tries) {
      Eigen::MatrixXd A = jtj;
      for (int d = 0; d < np; ++d) A(d, d) += lambda * std::max(jtj(d, d), 1e-12);
      const RVector step = A.ldlt().solve(-g);
      const RVector p_try = p + step;
      RVector r_try = fn(p_try);
      const double cost_try =
          r_try.allFinite() ? 0.5 * r_try.squaredNorm()
                            : std::numeric_limits<double>::infinity();
      if (cost_try < cost) {
        const double rel_drop = (cost - cost_try) / std::max(cost, 1e-300);
        const double rel_step =
            step.norm() / std::max(1.0, p.norm());
        p = p_try;
        r = std::move(r_try);
        cost = cost_try;
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
        if (rel_drop < opts.cost_tol || rel_step < opts.step_tol) {
          res.converged = true;
        }
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted) {
      res.converged = true;  // damping exhausted, stalled at a local minimum
      break;
    }
    if (res.converged) break;
    J = numeric_jacobian(fn, p, r, opts.jacobian_h);
  }

  res.params = p;
  res.rms = std::sqrt(r.squaredNorm() / std::max<int>(1, r.size()));
  res.iterations = iter;
  res.jtj = J.transpose() * J;
  return res;
}

LevMarResult multistart_levmar(const ResidualFn& fn, const RVector& p0,
                               const RVector& spread, int n_starts,
                               std::uint64_t seed, const LevMarOptions& opts) {
  if (spread.size() != p0.size()) {
    throw FitError("multistart_levmar: spread/parameter size mismatch");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  LevMarResult best;
  bool have_best = false;
  for (int s = 0; s < n_starts; ++s) {
    RVector start = p0;
    if (s > 0) {
      for (int j = 0; j < p0.size(); ++j) start[j] += spread[j] * unit(rng);
    }
    try {
      LevMarResult r = levmar(fn, start, opts);
      if (!have_best || r.rms < best.rms) {
        best = std::move(r);
        have_best = true;
      }
    } catch (const FitError&) {
      // a bad start is not fatal as long as one start succeeds
    }
  }
  if (!have_best) throw FitError("multistart_levmar: all starts failed");
  return best;
}

}  // namespace yigcirc
