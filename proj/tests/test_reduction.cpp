#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "yigcirc/model.hpp"
#include "yigcirc/reduction.hpp"

using namespace yigcirc;

namespace {

std::vector<Complex> sorted_eigs(const CVector& v) {
  std::vector<Complex> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

}  // namespace

TEST_CASE("adiabatic_eliminate: decoupled cavities return the bare block") {
  ModelParams p;
  p.g_x0 = p.g_x1 = p.g_y0 = p.g_y1 = 0.0;
  const CMatrix H4 = build_four_mode(p, 10.0);
  const ReducedModel rm = adiabatic_eliminate(H4);
  CHECK(rm.degenerate);
  CHECK(rm.r == 1.0);
  CHECK((rm.H - H4.block(0, 0, 2, 2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("adiabatic_eliminate: hand-evaluated block formula on a small example") {
  // H4 = [[A, B], [C, D]] with simple entries; oracle is scalar arithmetic
  // on the 2x2 inverse (wbar I - D)^{-1} = adj/det.
  CMatrix H4 = CMatrix::Zero(4, 4);
  H4 << Complex(10.0, -0.05), 0.5, 0.2, 0.3,
        0.5, Complex(11.0, 0.0), 0.1, -0.3,
        0.2, 0.1, Complex(14.0, -0.5), Complex(0.0, -0.25),
        0.3, -0.3, Complex(0.0, 0.25), 16.0;
  const double wbar = 10.5;  // (10 + 11)/2
  const ReducedModel rm = adiabatic_eliminate(H4);
  CHECK(rm.omega_bar == doctest::Approx(wbar));

  const Complex m00 = wbar - H4(2, 2), m11 = wbar - H4(3, 3);
  const Complex m01 = -H4(2, 3), m10 = -H4(3, 2);
  const Complex det = m00 * m11 - m01 * m10;
  // inv = [[m11, -m01], [-m10, m00]] / det
  const Complex i00 = m11 / det, i01 = -m01 / det, i10 = -m10 / det, i11 = m00 / det;
  // H'_ab = A_ab + sum_{k,l} B_ak inv_kl C_lb
  auto Bm = [&](int a, int k) { return H4(a, 2 + k); };
  auto Cm = [&](int k, int b) { return H4(2 + k, b); };
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const Complex inv[2][2] = {{i00, i01}, {i10, i11}};
      Complex expect = H4(a, b);
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) expect += Bm(a, k) * inv[k][l] * Cm(l, b);
      CHECK(std::abs(rm.H(a, b) - expect) < 1e-13);
    }
  }
  CHECK(rm.r == doctest::Approx(std::sqrt(std::abs(rm.h21) / std::abs(rm.h12))));
}

TEST_CASE("adiabatic_eliminate: reciprocal at zero field") {
  ModelParams p;
  const ReducedModel rm = adiabatic_eliminate(build_four_mode(p, 0.0));
  CHECK(std::abs(rm.h12) == doctest::Approx(std::abs(rm.h21)).epsilon(1e-12));
  CHECK(rm.r == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("adiabatic_eliminate: r(B) * r(-B) = 1 across the sweep") {
  ModelParams p;
  for (double B = 2.0; B <= 40.0; B += 2.0) {
    const ReducedModel rp = adiabatic_eliminate(build_four_mode(p, B));
    const ReducedModel rmn = adiabatic_eliminate(build_four_mode(p, -B));
    CHECK(rp.r * rmn.r == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("adiabatic_eliminate: singular circulator block rejected") {
  CMatrix H4 = CMatrix::Zero(4, 4);
  H4(0, 0) = 10.0;
  H4(1, 1) = 10.0;
  H4(2, 2) = 10.0;  // wbar = 10 makes (wbar I - D) singular
  H4(3, 3) = 10.0;
  CHECK_THROWS_AS(adiabatic_eliminate(H4), SingularError);
  CHECK_THROWS_AS(adiabatic_eliminate(CMatrix::Zero(3, 3)), DomainError);
}

TEST_CASE("reduction fidelity: cavity-like eigenvalues match the 4x4 for |B| >= 15 mT") {
  ModelParams p;
  for (double Babs = 15.0; Babs <= 40.0; Babs += 2.5) {
    for (double B : {Babs, -Babs}) {
      const CMatrix H4 = build_four_mode(p, B);
      const auto full = sorted_eigs(eig_biorthogonal(H4).values);
      const ReducedModel rm = adiabatic_eliminate(H4);
      const auto red = sorted_eigs(eig_biorthogonal(rm.H).values);
      for (const Complex& ev : red) {
        // Nearest full-model eigenvalue.
        double best = 1e300;
        for (const Complex& fv : full) best = std::min(best, std::abs(fv - ev));
        const double kappa_ghz = -2.0 * ev.imag();
        const double tol = std::max(0.5e-3, 0.05 * kappa_ghz);
        CHECK(best < tol);
      }
    }
  }
}

TEST_CASE("similarity_analysis: reciprocal input is unchanged") {
  ReducedModel rm;
  rm.H = CMatrix::Zero(2, 2);
  rm.H << 10.0, Complex(0.3, 0.1), Complex(0.3, 0.1), 11.0;
  rm.h12 = rm.H(0, 1);
  rm.h21 = rm.H(1, 0);
  rm.r = 1.0;
  const SimilarityResult sr = similarity_analysis(rm);
  CHECK(sr.r == 1.0);
  CHECK((sr.H_rec - rm.H).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("similarity_analysis: [[0,4],[1,0]] balances to off-diagonals of 2") {
  ReducedModel rm;
  rm.H = CMatrix::Zero(2, 2);
  rm.H(0, 1) = 4.0;
  rm.H(1, 0) = 1.0;
  rm.h12 = 4.0;
  rm.h21 = 1.0;
  rm.r = 0.5;
  const SimilarityResult sr = similarity_analysis(rm);
  CHECK(sr.r == doctest::Approx(0.5));
  CHECK(std::abs(sr.H_rec(0, 1) - 2.0) < 1e-14);
  CHECK(std::abs(sr.H_rec(1, 0) - 2.0) < 1e-14);
}

TEST_CASE("similarity_analysis: spectrum preserved, |H12| = |H21| after transform") {
  ModelParams p;
  for (double B : {8.0, 20.0, 28.0}) {
    const ReducedModel rm = adiabatic_eliminate(build_four_mode(p, B));
    const SimilarityResult sr = similarity_analysis(rm);
    CHECK(std::abs(std::abs(sr.H_rec(0, 1)) - std::abs(sr.H_rec(1, 0))) < 1e-10);
    const auto a = sorted_eigs(eig_biorthogonal(rm.H).values);
    const auto b = sorted_eigs(eig_biorthogonal(sr.H_rec).values);
    for (int n = 0; n < 2; ++n) CHECK(std::abs(a[n] - b[n]) < 1e-10);
  }
}

TEST_CASE("similarity_analysis: degenerate coupling rejected") {
  ReducedModel rm;
  rm.H = CMatrix::Zero(2, 2);
  rm.h12 = 0.0;
  rm.h21 = 1.0;
  CHECK_THROWS_AS(similarity_analysis(rm), SingularError);
}

TEST_CASE("r_limit_check: exact limits for localized modes") {
  // Construct a reduced model with r = 2 and hand-placed eigenvectors via a
  // diagonal-dominant H'.
  ReducedModel rm;
  rm.H = CMatrix::Zero(2, 2);
  rm.H(0, 1) = 0.25;
  rm.H(1, 0) = 1.0;
  rm.h12 = rm.H(0, 1);
  rm.h21 = rm.H(1, 0);
  rm.r = 2.0;

  // Site-1 localized mode: eigensystem with right vector e1 -> R = 1.
  EigenSystem es;
  es.values = CVector::Zero(2);
  es.right = CMatrix::Identity(2, 2);
  es.left = CMatrix::Identity(2, 2);
  const auto entries = r_limit_check(rm, es);
  CHECK(entries[0].R_predicted == doctest::Approx(1.0));
  CHECK(entries[0].cls == RLimitClass::NearUnity);
  // Site-2 localized mode -> R = r^2 = 4.
  CHECK(entries[1].R_predicted == doctest::Approx(4.0));
  CHECK(entries[1].cls == RLimitClass::NearRSquared);
}

TEST_CASE("r_limit_check: mode classification at 25 mT") {
  ModelParams p;
  const ReducedModel rm = adiabatic_eliminate(build_four_mode(p, 25.0));
  const EigenSystem es2 = eig_biorthogonal(rm.H);
  const auto entries = r_limit_check(rm, es2);
  // One cavity-1-dominated mode near R=1, one cavity-2-dominated near r^2.
  int near_unity = 0, near_r2 = 0;
  for (const auto& e : entries) {
    if (e.cls == RLimitClass::NearUnity) ++near_unity;
    if (e.cls == RLimitClass::NearRSquared) ++near_r2;
  }
  CHECK(near_unity == 1);
  CHECK(near_r2 == 1);
}
