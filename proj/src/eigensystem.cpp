#include "yigcirc/eigensystem.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "yigcirc/model.hpp"

namespace yigcirc {

double EigenSystem::biorthogonality_error() const {
  CMatrix overlap = left.adjoint() * right;
  return (overlap - CMatrix::Identity(size(), size())).cwiseAbs().maxCoeff();
}

double EigenSystem::completeness_error() const {
  CMatrix sum = CMatrix::Zero(size(), size());
  for (int n = 0; n < size(); ++n) {
    sum += right.col(n) * left.col(n).adjoint();
  }
  return (sum - CMatrix::Identity(size(), size())).cwiseAbs().maxCoeff();
}

EigenSystem eig_biorthogonal(const CMatrix& H) {
  if (H.rows() != H.cols()) throw DomainError("eig_biorthogonal: matrix not square");
  const int n = static_cast<int>(H.rows());
  if (n > 16) throw DomainError("eig_biorthogonal: dimension > 16");
  if (!H.allFinite()) throw DomainError("eig_biorthogonal: non-finite entries");

  Eigen::ComplexEigenSolver<CMatrix> right_solver(H);
  Eigen::ComplexEigenSolver<CMatrix> left_solver(H.adjoint());
  if (right_solver.info() != Eigen::Success || left_solver.info() != Eigen::Success) {
    throw SingularError("eig_biorthogonal: eigensolver failed");
  }

  // Sort right modes by (Re, Im) for a deterministic ordering.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const CVector& rv = right_solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (rv[a].real() != rv[b].real()) return rv[a].real() < rv[b].real();
    return rv[a].imag() < rv[b].imag();
  });

  EigenSystem es;
  es.values.resize(n);
  es.right.resize(n, n);
  es.left.resize(n, n);

  // H^dagger eigenvalues are conjugates of H's; pair greedily.
  const CVector& lv = left_solver.eigenvalues();
  std::vector<bool> used(n, false);
  for (int slot = 0; slot < n; ++slot) {
    const int r = order[slot];
    es.values[slot] = rv[r];
    es.right.col(slot) = right_solver.eigenvectors().col(r);

    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      double dist = std::abs(std::conj(lv[j]) - rv[r]);
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best < 0 || best_dist > 1e-8) {
      throw SingularError("eig_biorthogonal: left/right eigenvalue pairing failed");
    }
    used[best] = true;
    es.left.col(slot) = left_solver.eigenvectors().col(best);
  }

  // Gauge fixing and biorthogonal normalization.
  for (int slot = 0; slot < n; ++slot) {
    CVector r = es.right.col(slot);
    int imax = 0;
    for (int i = 1; i < n; ++i) {
      if (std::abs(r[i]) > std::abs(r[imax])) imax = i;
    }
    Complex phase = r[imax] / std::abs(r[imax]);
    r /= phase * r.norm();
    es.right.col(slot) = r;

    Complex ip = (es.left.col(slot).adjoint() * r)(0);
    if (std::abs(ip) < 1e-14) {
      throw SingularError("eig_biorthogonal: defective eigenvector pair");
    }
    // <L|R> = conj(scale applied to L) * ip, so divide L by conj(ip).
    es.left.col(slot) /= std::conj(ip);
  }

  es.min_gap = std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      es.min_gap = std::min(es.min_gap, std::abs(es.values[a] - es.values[b]));
    }
  }
  if (n < 2) es.min_gap = std::numeric_limits<double>::infinity();
  es.near_defective = es.min_gap < 1e-9;
  return es;
}

double r_ratio(const EigenSystem& es, int bare_index, int mode) {
  if (bare_index < 0 || bare_index >= es.size() || mode < 0 || mode >= es.size()) {
    throw DomainError("r_ratio: index out of range");
  }
  const double rn = std::abs(es.right(bare_index, mode)) / es.right.col(mode).norm();
  const double ln = std::abs(es.left(bare_index, mode)) / es.left.col(mode).norm();
  if (rn < 1e-12) {
    throw SingularError("r_ratio: |<i|n_R>| below 1e-12");
  }
  return ln / rn;
}

double amplitude_ratio(const ModelParams& p, double B_mT, int mode) {
  EigenSystem es = eig_biorthogonal(build_four_mode(p, B_mT));
  if (mode < 0 || mode >= es.size()) throw DomainError("amplitude_ratio: bad mode");
  constexpr int kCavity1 = 0;
  constexpr int kModeY = 2;
  const double denom =
      std::abs(es.right(kCavity1, mode)) * std::abs(es.left(kModeY, mode));
  if (denom < 1e-300) throw SingularError("amplitude_ratio: negligible overlap");
  return std::abs(es.left(kCavity1, mode)) * std::abs(es.right(kModeY, mode)) / denom;
}

TrackResult track_modes(const std::vector<EigenSystem>& sweep) {
  TrackResult tr;
  if (sweep.empty()) return tr;
  const int n = sweep.front().size();
  tr.assignment.resize(sweep.size());
  tr.ambiguous.assign(sweep.size(), false);

  std::vector<int> prev(n);
  std::iota(prev.begin(), prev.end(), 0);
  tr.assignment[0] = prev;

  for (size_t i = 1; i < sweep.size(); ++i) {
    if (sweep[i].size() != n) throw DomainError("track_modes: inconsistent sizes");
    // overlap[label][mode] between the previously assigned vector and the
    // candidate modes at this point.
    Eigen::MatrixXd overlap(n, n);
    for (int label = 0; label < n; ++label) {
      CVector ref = sweep[i - 1].right.col(tr.assignment[i - 1][label]);
      ref /= ref.norm();
      for (int m = 0; m < n; ++m) {
        CVector cur = sweep[i].right.col(m);
        overlap(label, m) = std::abs((ref.adjoint() * (cur / cur.norm()))(0));
      }
    }
    std::vector<int> assign(n, -1);
    std::vector<bool> mode_used(n, false), label_done(n, false);
    for (int step = 0; step < n; ++step) {
      int bl = -1, bm = -1;
      double best = -1.0;
      for (int label = 0; label < n; ++label) {
        if (label_done[label]) continue;
        for (int m = 0; m < n; ++m) {
          if (mode_used[m]) continue;
          if (overlap(label, m) > best) {
            best = overlap(label, m);
            bl = label;
            bm = m;
          }
        }
      }
      double second = -1.0;
      for (int m = 0; m < n; ++m) {
        if (!mode_used[m] && m != bm) second = std::max(second, overlap(bl, m));
      }
      if (second >= 0 && best - second < 0.1) tr.ambiguous[i] = true;
      assign[bl] = bm;
      label_done[bl] = true;
      mode_used[bm] = true;
    }
    tr.assignment[i] = assign;
  }
  return tr;
}

}  // namespace yigcirc
