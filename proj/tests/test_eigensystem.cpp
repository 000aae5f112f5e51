#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "yigcirc/eigensystem.hpp"
#include "yigcirc/model.hpp"

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

// Coefficients of det(H - w I) for a 4x4 matrix by explicit cofactor
// expansion of the characteristic polynomial, evaluated symbolically in w
// via polynomial arithmetic on (at most) degree-4 coefficient arrays.
struct Poly {
  // c[k] multiplies w^k.
  std::array<Complex, 5> c{};
  static Poly constant(Complex v) {
    Poly p;
    p.c[0] = v;
    return p;
  }
  static Poly linear(Complex a0, Complex a1) {
    Poly p;
    p.c[0] = a0;
    p.c[1] = a1;
    return p;
  }
  Poly operator*(const Poly& o) const {
    Poly r;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j + i < 5; ++j) r.c[i + j] += c[i] * o.c[j];
    return r;
  }
  Poly operator+(const Poly& o) const {
    Poly r;
    for (int i = 0; i < 5; ++i) r.c[i] = c[i] + o.c[i];
    return r;
  }
  Poly operator-(const Poly& o) const {
    Poly r;
    for (int i = 0; i < 5; ++i) r.c[i] = c[i] - o.c[i];
    return r;
  }
};

Poly det3(const std::array<std::array<Poly, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

std::array<Complex, 5> char_poly4(const CMatrix& H) {
  // Entries of H - w I as degree-1 polynomials in w.
  std::array<std::array<Poly, 4>, 4> m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      m[i][j] = i == j ? Poly::linear(H(i, j), -1.0) : Poly::constant(H(i, j));

  Poly det;
  for (int j = 0; j < 4; ++j) {
    std::array<std::array<Poly, 3>, 3> minor;
    for (int r = 1; r < 4; ++r) {
      int cc = 0;
      for (int c = 0; c < 4; ++c) {
        if (c == j) continue;
        minor[r - 1][cc++] = m[r][c];
      }
    }
    const Poly term = m[0][j] * det3(minor);
    det = (j % 2 == 0) ? det + term : det - term;
  }
  return det.c;
}

std::vector<Complex> poly_roots4(const std::array<Complex, 5>& c) {
  // Companion-matrix root finding on the monic polynomial, then Newton
  // polish against the explicit polynomial to remove the conditioning loss
  // of the large constant coefficients.
  CMatrix comp = CMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) comp(i, 3) = -c[i] / c[4];
  for (int i = 1; i < 4; ++i) comp(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<CMatrix> es(comp);
  CVector v = es.eigenvalues();
  for (int n = 0; n < 4; ++n) {
    Complex x = v[n];
    for (int it = 0; it < 8; ++it) {
      Complex f = 0.0, df = 0.0;
      for (int k = 4; k >= 0; --k) f = f * x + c[k];
      for (int k = 4; k >= 1; --k) df = df * x + double(k) * c[k];
      if (std::abs(df) < 1e-300) break;
      x -= f / df;
    }
    v[n] = x;
  }
  return sorted_eigs(v);
}

}  // namespace

TEST_CASE("eig_biorthogonal: diagonal matrix") {
  CMatrix H = CMatrix::Zero(2, 2);
  H(0, 0) = 1.0;
  H(1, 1) = Complex(2.0, -0.5);
  const EigenSystem es = eig_biorthogonal(H);
  CHECK(std::abs(es.values(0) - Complex(1.0, 0.0)) < 1e-14);
  CHECK(std::abs(es.values(1) - Complex(2.0, -0.5)) < 1e-14);
  CHECK(std::abs(es.right(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(es.right(1, 1) - 1.0) < 1e-14);
  CHECK(es.biorthogonality_error() < 1e-12);
  CHECK(es.completeness_error() < 1e-12);
}

TEST_CASE("eig_biorthogonal: Hermitian input has real eigenvalues, left == right") {
  ModelParams p;
  for (double B : {-20.0, 0.0, 15.0}) {
    const CMatrix H = build_two_mode(p, B);
    const EigenSystem es = eig_biorthogonal(H);
    for (int n = 0; n < 2; ++n) {
      CHECK(std::abs(es.values(n).imag()) < 1e-12);
      // Left and right vectors coincide up to the <nL|nR>=1 normalization.
      const double align = std::abs(es.left.col(n).dot(es.right.col(n))) /
                           (es.left.col(n).norm() * es.right.col(n).norm());
      CHECK(align == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK(es.biorthogonality_error() < 1e-10);
  }
}

TEST_CASE("eig_biorthogonal: 4x4 eigenvalues match characteristic-polynomial roots") {
  ModelParams p;
  const CMatrix H = build_four_mode(p, 28.0);
  const EigenSystem es = eig_biorthogonal(H);
  const auto mine = sorted_eigs(es.values);
  // Shift by the mean diagonal before expanding the polynomial: the raw
  // coefficients (~omega^4) would lose ~8 digits to rounding, which is a
  // conditioning artifact of the oracle, not of the eigensolver.
  const Complex shift = H.trace() / 4.0;
  const CMatrix Hs = H - shift * CMatrix::Identity(4, 4);
  auto oracle = poly_roots4(char_poly4(Hs));
  for (auto& r : oracle) r += shift;
  std::sort(oracle.begin(), oracle.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (int n = 0; n < 4; ++n) CHECK(std::abs(mine[n] - oracle[n]) < 1e-9);
}

TEST_CASE("eig_biorthogonal: biorthogonality and completeness over a field sweep") {
  ModelParams p;
  for (double B = -40.0; B <= 40.0; B += 2.0) {
    const EigenSystem es = eig_biorthogonal(build_four_mode(p, B));
    if (es.near_defective) continue;
    CHECK(es.biorthogonality_error() < 1e-10);
    CHECK(es.completeness_error() < 1e-8);
  }
}

TEST_CASE("eigenvalue parity: spectra of H(B) and H(-B) coincide") {
  ModelParams p;
  for (double B = 0.5; B <= 40.0; B += 2.5) {
    const auto ep = sorted_eigs(eig_biorthogonal(build_four_mode(p, B)).values);
    const auto em = sorted_eigs(eig_biorthogonal(build_four_mode(p, -B)).values);
    for (int n = 0; n < 4; ++n) CHECK(std::abs(ep[n] - em[n]) < 1e-10);
  }
}

TEST_CASE("left-right exchange: |n_R(B)> matches |n_L(-B)>* mode-by-mode") {
  ModelParams p;
  for (double B : {5.0, 18.0, 28.0}) {
    const EigenSystem ep = eig_biorthogonal(build_four_mode(p, B));
    const EigenSystem em = eig_biorthogonal(build_four_mode(p, -B));
    // Modes are sorted by eigenvalue and the spectra coincide, so indices align.
    for (int n = 0; n < 4; ++n) {
      const CVector v = em.left.col(n).conjugate().normalized();
      const double overlap = std::abs(v.dot(ep.right.col(n).normalized()));
      CHECK(overlap == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("r_ratio: unity for Hermitian matrices") {
  ModelParams p;
  const EigenSystem es = eig_biorthogonal(build_two_mode(p, 12.0));
  for (int i = 0; i < 2; ++i)
    for (int n = 0; n < 2; ++n)
      CHECK(r_ratio(es, i, n) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("r_ratio: asymmetric-hopping dimer against the closed form") {
  // H = [[0, t e^g], [t e^-g, 0]]; eigenvectors are known in closed form:
  // right ~ (e^{g/2}, +-e^{-g/2}), left ~ (e^{-g/2}, +-e^{g/2}).
  const double t = 1.3, g = 0.7;
  CMatrix H = CMatrix::Zero(2, 2);
  H(0, 1) = t * std::exp(g);
  H(1, 0) = t * std::exp(-g);
  const EigenSystem es = eig_biorthogonal(H);

  // Hand-derived: R_{0,n} = |e^{-g/2}|/norm_L / (|e^{g/2}|/norm_R) with
  // norm_L = norm_R = sqrt(2 cosh g), i.e. R_{0,n} = e^{-g}, R_{1,n} = e^{g}.
  for (int n = 0; n < 2; ++n) {
    CHECK(r_ratio(es, 0, n) == doctest::Approx(std::exp(-g)).epsilon(1e-10));
    CHECK(r_ratio(es, 1, n) == doctest::Approx(std::exp(g)).epsilon(1e-10));
  }
  // Eigenvalues +-t are unchanged by the similarity transform.
  const auto vals = sorted_eigs(es.values);
  CHECK(std::abs(vals[0] - Complex(-t, 0.0)) < 1e-12);
  CHECK(std::abs(vals[1] - Complex(t, 0.0)) < 1e-12);
}

TEST_CASE("amplitude_ratio: unity in the Hermitian and zero-field limits") {
  ModelParams p;
  SUBCASE("lossless model") {
    p.kappa_1 = p.kappa_2 = p.kappa_3 = 0.0;
    for (int n = 0; n < 4; ++n)
      CHECK(amplitude_ratio(p, 17.0, n) == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("B -> 0 limit") {
    for (int n = 0; n < 4; ++n)
      CHECK(amplitude_ratio(p, 1e-6, n) == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("track_modes: field-independent sweep keeps the identity assignment") {
  ModelParams p;
  const EigenSystem es = eig_biorthogonal(build_four_mode(p, 20.0));
  const std::vector<EigenSystem> sweep(5, es);
  const TrackResult tr = track_modes(sweep);
  for (const auto& perm : tr.assignment)
    for (int n = 0; n < 4; ++n) CHECK(perm[n] == n);
}

TEST_CASE("track_modes: uncoupled crossing modes follow their basis vectors") {
  // Two diagonal levels crossing linearly; eigenvectors stay e1/e2 so the
  // labels must follow the diagonal entries straight through the crossing.
  std::vector<EigenSystem> sweep;
  std::vector<double> f1, f2;
  for (double x = -1.0; x <= 1.0; x += 0.25) {
    CMatrix H = CMatrix::Zero(2, 2);
    H(0, 0) = 10.0 + x;   // rising level on basis vector e1
    H(1, 1) = 10.0 - x;   // falling level on e2
    sweep.push_back(eig_biorthogonal(H));
    f1.push_back(10.0 + x);
    f2.push_back(10.0 - x);
  }
  const TrackResult tr = track_modes(sweep);
  // Each label must stay on its basis vector through the crossing.
  for (int label = 0; label < 2; ++label) {
    const int basis =
        std::abs(sweep[0].right(0, tr.assignment[0][label])) > 0.5 ? 0 : 1;
    for (size_t i = 0; i < sweep.size(); ++i) {
      const int m = tr.assignment[i][label];
      CHECK(std::abs(std::abs(sweep[i].right(basis, m)) - 1.0) < 1e-12);
      CHECK(sweep[i].values(m).real() ==
            doctest::Approx(basis == 0 ? f1[i] : f2[i]).epsilon(1e-12));
    }
  }
  // The labelled frequencies are continuous (no jumps beyond one step).
  for (size_t i = 1; i < sweep.size(); ++i) {
    for (int label = 0; label < 2; ++label) {
      const double prev = sweep[i - 1].values(tr.assignment[i - 1][label]).real();
      const double cur = sweep[i].values(tr.assignment[i][label]).real();
      CHECK(std::abs(cur - prev) < 0.26);
    }
  }
}

TEST_CASE("eig_biorthogonal: input validation") {
  CHECK_THROWS_AS(eig_biorthogonal(CMatrix::Zero(2, 3)), DomainError);
  CHECK_THROWS_AS(eig_biorthogonal(CMatrix::Zero(17, 17)), DomainError);
  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eig_biorthogonal(bad), DomainError);
}
