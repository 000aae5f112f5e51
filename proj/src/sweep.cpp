#include "yigcirc/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include "yigcirc/model.hpp"

namespace yigcirc {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (int i = t; i < n; i += threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> linspace(double start, double stop, int count) {
  if (count < 1) throw DomainError("linspace: count must be >= 1");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = start;
    return out;
  }
  for (int i = 0; i < count; ++i) {
    out[i] = start + (stop - start) * i / (count - 1);
  }
  return out;
}

std::vector<double> stepped_grid(double start, double stop, double step) {
  if (!(step > 0)) throw DomainError("stepped_grid: step must be > 0");
  if (stop < start) throw DomainError("stepped_grid: stop < start");
  std::vector<double> out;
  const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(start + i * step);
  return out;
}

std::pair<int, int> prominent_modes(const EigenSystem& es,
                                    const LorentzianSet& s31_components) {
  if (static_cast<int>(s31_components.size()) != es.size()) {
    throw DomainError("prominent_modes: component/eigensystem size mismatch");
  }
  auto height = [&](int n) {
    return s31_components[n].amplitude /
           std::max(0.5 * mhz(s31_components[n].kappa_mhz), 1e-12);
  };
  std::vector<int> idx(es.size());
  for (int i = 0; i < es.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return height(a) > height(b); });
  int a = idx[0], b = idx[1];
  const double wa = std::abs(es.right(0, a)) / es.right.col(a).norm();
  const double wb = std::abs(es.right(0, b)) / es.right.col(b).norm();
  if (wb > wa) std::swap(a, b);
  return {a, b};
}

std::vector<EigenSweepRow> eigen_sweep(const ModelParams& p,
                                       const std::vector<double>& B_grid,
                                       int threads) {
  p.validate();
  const int nb = static_cast<int>(B_grid.size());
  const PortMap ports = four_mode_ports(p);

  std::vector<EigenSystem> systems(nb);
  std::vector<LorentzianSet> decomps(nb);
  parallel_for(nb, threads, [&](int i) {
    systems[i] = eig_biorthogonal(build_four_mode(p, B_grid[i]));
    decomps[i] = lorentzian_decomposition(systems[i], ports, 2, 0);
  });

  const TrackResult tracks = track_modes(systems);

  std::vector<EigenSweepRow> rows;
  rows.reserve(nb * 4);
  for (int i = 0; i < nb; ++i) {
    const EigenSystem& es = systems[i];
    for (int label = 0; label < es.size(); ++label) {
      const int mode = tracks.assignment[i][label];
      EigenSweepRow row;
      row.B_mt = B_grid[i];
      row.label = label;
      row.freq_ghz = es.values[mode].real();
      row.kappa_mhz = -2.0 * es.values[mode].imag() * 1e3;
      row.amplitude = decomps[i][mode].amplitude;
      row.phase = decomps[i][mode].phase;
      row.R1 = r_ratio(es, 0, mode);
      row.Ry = r_ratio(es, 2, mode);
      row.amp_ratio = row.R1 / row.Ry;
      row.flagged = es.near_defective || tracks.ambiguous[i];
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<ReducedRow> reduced_sweep(const ModelParams& p,
                                      const std::vector<double>& B_grid) {
  p.validate();
  std::vector<ReducedRow> rows;
  rows.reserve(B_grid.size());
  for (double B : B_grid) {
    const ReducedModel rm = adiabatic_eliminate(build_four_mode(p, B));
    const EigenSystem es = eig_biorthogonal(rm.H);
    ReducedRow row;
    row.B_mt = B;
    row.h12_mhz = rm.h12_mhz();
    row.h21_mhz = rm.h21_mhz();
    row.r = rm.r;
    row.eig1 = es.values[0];
    row.eig2 = es.values[1];
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd s31_map(const ModelParams& p, const std::vector<double>& B_grid,
                        const std::vector<double>& omega_grid, int threads) {
  p.validate();
  const int nb = static_cast<int>(B_grid.size());
  const int nw = static_cast<int>(omega_grid.size());
  const PortMap ports = four_mode_ports(p);
  Eigen::MatrixXd out(nb, nw);
  parallel_for(nb, threads, [&](int i) {
    const CMatrix H = build_four_mode(p, B_grid[i]);
    for (int j = 0; j < nw; ++j) {
      out(i, j) = std::abs(s_matrix(H, ports, omega_grid[j])(2, 0));
    }
  });
  return out;
}

CirculatorWorkingPoint find_working_point(double omega0_ghz, double kappa_c_mhz,
                                          double kappa_i_mhz) {
  if (!(kappa_c_mhz > 0)) throw DomainError("find_working_point: kappa_c must be > 0");

  auto isolated_mag = [&](double delta_mhz) {
    const CMatrix S = three_port_circulator(omega0_ghz, delta_mhz, kappa_c_mhz,
                                            kappa_i_mhz, omega0_ghz);
    return std::abs(S(2, 0));
  };

  // Golden-section minimization of the isolated-port magnitude over delta.
  double lo = 0.05 * kappa_c_mhz, hi = 4.0 * kappa_c_mhz;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = isolated_mag(c), fd = isolated_mag(d);
  for (int it = 0; it < 200 && (hi - lo) > 1e-9 * kappa_c_mhz; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = isolated_mag(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = isolated_mag(d);
    }
  }
  CirculatorWorkingPoint wp;
  wp.delta_star_mhz = 0.5 * (lo + hi);

  const CMatrix S0 = three_port_circulator(omega0_ghz, wp.delta_star_mhz,
                                           kappa_c_mhz, kappa_i_mhz, omega0_ghz);
  wp.insertion_loss = insertion_loss(S0).loss;
  wp.isolation_db = 20.0 * std::log10(std::max(std::abs(S0(1, 0)), 1e-300) /
                                      std::max(std::abs(S0(2, 0)), 1e-300));
  wp.isolation_db = std::min(wp.isolation_db, 120.0);

  // 20 dB bandwidth around the center frequency.
  auto isolation_at = [&](double omega) {
    const CMatrix S = three_port_circulator(omega0_ghz, wp.delta_star_mhz,
                                            kappa_c_mhz, kappa_i_mhz, omega);
    return 20.0 * std::log10(std::max(std::abs(S(1, 0)), 1e-300) /
                             std::max(std::abs(S(2, 0)), 1e-300));
  };
  const double span = 4.0 * mhz(kappa_c_mhz);  // GHz
  const int npts = 4001;
  double lo_edge = omega0_ghz, hi_edge = omega0_ghz;
  for (int i = (npts - 1) / 2; i >= 0; --i) {
    const double w = omega0_ghz - span * i / (npts - 1);
    if (isolation_at(w) < 20.0) break;
    lo_edge = w;
  }
  for (int i = 0; i <= (npts - 1) / 2; ++i) {
    const double w = omega0_ghz + span * i / (npts - 1);
    if (isolation_at(w) < 20.0) break;
    hi_edge = w;
  }
  wp.bandwidth_20db_mhz = (hi_edge - lo_edge) * 1e3;
  return wp;
}

}  // namespace yigcirc
