#include "yigcirc/anisotropy.hpp"

#include <array>
#include <cmath>

#include "yigcirc/levmar.hpp"

namespace yigcirc {

void ToyModelParams::validate() const {
  if (!(T > 0)) throw DomainError("ToyModelParams: T must be > 0");
  if (K < 0) throw DomainError("ToyModelParams: K must be >= 0");
  if (!std::isfinite(M) || !std::isfinite(K) || !std::isfinite(T)) {
    throw DomainError("ToyModelParams: parameters must be finite");
  }
}

namespace {

double simpson_segment(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a,
                     double fa, double b, double fb, double m, double fm,
                     double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_segment(a, m, fa, flm, fm);
  const double right = simpson_segment(m, b, fm, frm, fb);
  const double err = left + right - whole;
  if (std::abs(err) <= 15.0 * tol || depth <= 0) {
    if (depth <= 0 && std::abs(err) > 15.0 * tol) {
      throw Error("adaptive_simpson: refinement limit reached");
    }
    return left + right + err / 15.0;
  }
  const double child_tol = tol / std::sqrt(2.0);
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, child_tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, child_tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
  // Fixed initial grid: sample 64 panels up front.  This both scales the
  // tolerance with a composite magnitude estimate and guarantees that
  // features narrower than the whole interval still get sampled before the
  // adaptive recursion decides an interval has converged.
  const int kPanels = 64;
  std::array<double, kPanels + 1> x{}, fx{};
  double magnitude = 0.0;
  for (int i = 0; i <= kPanels; ++i) {
    x[i] = a + (b - a) * i / kPanels;
    fx[i] = f(x[i]);
    if (i > 0) {
      magnitude += 0.5 * (std::abs(fx[i - 1]) + std::abs(fx[i])) * (b - a) / kPanels;
    }
  }
  const double scale = std::max(magnitude, 1e-300);
  // Adapt on 32 fixed subintervals, each seeded with its midpoint sample.
  const double sub_tol = tol * scale / std::sqrt(kPanels / 2.0);
  double total = 0.0;
  for (int i = 0; i + 2 <= kPanels; i += 2) {
    const double whole =
        simpson_segment(x[i], x[i + 2], fx[i], fx[i + 1], fx[i + 2]);
    total += adaptive_step(f, x[i], fx[i], x[i + 2], fx[i + 2], x[i + 1],
                           fx[i + 1], whole, sub_tol, max_depth);
  }
  return total;
}

namespace {

// Boltzmann weight exp(a*cos(theta) + b*sin^2(theta)*cos^2(phi)) with the
// field and anisotropy in reduced units a = B*M/T, b = K/T.
double sphere_integral(double a, double b,
                       const std::function<double(double, double)>& observable) {
  auto outer = [&](double theta) {
    const double ct = std::cos(theta), st = std::sin(theta);
    auto inner = [&](double phi) {
      const double cp = std::cos(phi);
      return observable(theta, phi) * std::exp(a * ct + b * st * st * cp * cp);
    };
    // The inner integral runs much tighter than the outer tolerance so its
    // truncation error never becomes the outer integrand's noise floor.
    return st * adaptive_simpson(inner, 0.0, 2.0 * kPi, 1e-12);
  };
  return adaptive_simpson(outer, 0.0, kPi, 1e-9);
}

}  // namespace

double partition_function(const ToyModelParams& p, double B) {
  p.validate();
  const double a = B * p.M / p.T;
  const double b = p.K / p.T;
  return sphere_integral(a, b, [](double, double) { return 1.0; });
}

MomentExpectations moment_expectations(const ToyModelParams& p, double B) {
  p.validate();
  const double a = B * p.M / p.T;
  const double b = p.K / p.T;
  const double M2 = p.M * p.M;
  const double Z = sphere_integral(a, b, [](double, double) { return 1.0; });

  auto expect = [&](const std::function<double(double, double)>& obs) {
    return sphere_integral(a, b, obs) / Z;
  };

  MomentExpectations out;
  out.mx2 = M2 * expect([](double t, double f) {
    const double s = std::sin(t) * std::cos(f);
    return s * s;
  });
  out.my2 = M2 * expect([](double t, double f) {
    const double s = std::sin(t) * std::sin(f);
    return s * s;
  });
  out.mz2 = M2 * expect([](double t, double) {
    const double c = std::cos(t);
    return c * c;
  });
  out.mz = p.M * expect([](double t, double) { return std::cos(t); });
  return out;
}

std::vector<double> anisotropy_profile(const ToyModelParams& p,
                                       const std::vector<double>& B_grid) {
  p.validate();
  if (!(p.K > 0)) {
    throw DomainError("anisotropy_profile: K must be > 0 (degenerate otherwise)");
  }
  const MomentExpectations zero = moment_expectations(p, 0.0);
  const double norm = zero.mx2 - zero.my2;
  if (std::abs(norm) < 1e-12 * p.M * p.M) {
    throw DomainError("anisotropy_profile: zero-field moment difference negligible");
  }
  std::vector<double> out;
  out.reserve(B_grid.size());
  for (double B : B_grid) {
    const MomentExpectations m = moment_expectations(p, B);
    out.push_back((m.mx2 - m.my2) / norm);
  }
  return out;
}

SechFit fit_sech(const std::vector<double>& B, const std::vector<double>& D) {
  if (B.size() != D.size() || B.size() < 8) {
    throw FitError("fit_sech: need >= 8 grid points");
  }
  // Initial scale: largest field where the profile still exceeds
  // sech(1) ~ 0.648.
  double b0_init = 0.0;
  double b_max = 0.0;
  for (size_t i = 0; i < B.size(); ++i) {
    b_max = std::max(b_max, std::abs(B[i]));
    if (D[i] > 0.648) b0_init = std::max(b0_init, std::abs(B[i]));
  }
  if (!(b0_init > 0)) b0_init = b_max > 0 ? 0.5 * b_max : 1.0;

  auto residual = [&](const RVector& prm) {
    RVector r(B.size());
    const double b0 = std::abs(prm[0]) + 1e-12;
    for (size_t i = 0; i < B.size(); ++i) {
      r[static_cast<int>(i)] = 1.0 / std::cosh(B[i] / b0) - D[i];
    }
    return r;
  };
  RVector p0(1);
  p0[0] = b0_init;
  LevMarResult res = levmar(residual, p0);
  if (!res.converged) throw FitError("fit_sech: no convergence");
  return SechFit{std::abs(res.params[0]), res.rms};
}

}  // namespace yigcirc
