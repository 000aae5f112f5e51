#include "yigcirc/reduction.hpp"

#include <cmath>
#include <limits>

namespace yigcirc {

ReducedModel adiabatic_eliminate(const CMatrix& H4) {
  if (H4.rows() != 4 || H4.cols() != 4) {
    throw DomainError("adiabatic_eliminate: expected a 4x4 matrix");
  }
  return adiabatic_eliminate(H4, 0.5 * (H4(0, 0).real() + H4(1, 1).real()));
}

ReducedModel adiabatic_eliminate(const CMatrix& H4, double omega_bar) {
  if (H4.rows() != 4 || H4.cols() != 4) {
    throw DomainError("adiabatic_eliminate: expected a 4x4 matrix");
  }
  const CMatrix A = H4.block(0, 0, 2, 2);
  const CMatrix B = H4.block(0, 2, 2, 2);
  const CMatrix C = H4.block(2, 0, 2, 2);
  const CMatrix D = H4.block(2, 2, 2, 2);

  const CMatrix M = omega_bar * CMatrix::Identity(2, 2) - D;
  const Complex det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  if (std::abs(det) < 1e-14 * (1.0 + M.cwiseAbs().maxCoeff())) {
    throw SingularError("adiabatic_eliminate: (wbar*I - D) is singular");
  }

  ReducedModel rm;
  rm.omega_bar = omega_bar;
  rm.H = A + B * M.inverse() * C;
  rm.h12 = rm.H(0, 1);
  rm.h21 = rm.H(1, 0);
  if (std::abs(rm.h12) < 1e-15 || std::abs(rm.h21) < 1e-15) {
    rm.degenerate = true;
    rm.r = 1.0;
  } else {
    rm.r = std::sqrt(std::abs(rm.h21) / std::abs(rm.h12));
  }
  return rm;
}

SimilarityResult similarity_analysis(const ReducedModel& rm) {
  if (std::abs(rm.h12) < 1e-15 || std::abs(rm.h21) < 1e-15) {
    throw SingularError("similarity_analysis: degenerate off-diagonal coupling");
  }
  const double sr = std::sqrt(rm.r);
  CMatrix S = CMatrix::Zero(2, 2);
  S(0, 0) = sr;
  S(1, 1) = 1.0 / sr;
  CMatrix Sinv = CMatrix::Zero(2, 2);
  Sinv(0, 0) = 1.0 / sr;
  Sinv(1, 1) = sr;
  return SimilarityResult{S * rm.H * Sinv, rm.r};
}

std::vector<RLimitEntry> r_limit_check(const ReducedModel& rm,
                                       const EigenSystem& es2) {
  if (es2.size() != 2) throw DomainError("r_limit_check: expected a 2-mode system");
  const double r = rm.r;
  std::vector<RLimitEntry> out;
  out.reserve(2);
  for (int n = 0; n < 2; ++n) {
    // Map the right eigenvector of H' back to the reciprocal frame.
    const Complex x = std::sqrt(r) * es2.right(0, n);
    const Complex y = es2.right(1, n) / std::sqrt(r);
    const double ax = std::abs(x), ay = std::abs(y);

    RLimitEntry e;
    if (ay < 1e-300) {
      e.component_ratio = std::numeric_limits<double>::infinity();
      e.R_predicted = 1.0;
    } else {
      e.component_ratio = ax / ay;
      const double num = ax * ax / r + ay * ay * r;
      const double den = ax * ax * r + ay * ay / r;
      e.R_predicted = ax < 1e-300 ? r * r : r * std::sqrt(num / den);
    }
    // Classify by log-distance to the two limiting values.
    const double d1 = std::abs(std::log(e.R_predicted));
    const double d2 = std::abs(std::log(e.R_predicted) - 2.0 * std::log(r));
    e.cls = d1 <= d2 ? RLimitClass::NearUnity : RLimitClass::NearRSquared;
    out.push_back(e);
  }
  return out;
}

}  // namespace yigcirc
