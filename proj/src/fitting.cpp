#include "yigcirc/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "yigcirc/eigensystem.hpp"
#include "yigcirc/levmar.hpp"
#include "yigcirc/model.hpp"

namespace yigcirc {

void SpectrumTrace::validate() const {
  if (freq_ghz.size() < 32) throw DomainError("SpectrumTrace: need >= 32 points");
  if (freq_ghz.size() != s.size()) throw DomainError("SpectrumTrace: size mismatch");
  for (int i = 1; i < freq_ghz.size(); ++i) {
    if (!(freq_ghz[i] > freq_ghz[i - 1])) {
      throw DomainError("SpectrumTrace: frequency grid must be strictly increasing");
    }
  }
}

namespace {

RVector magnitudes(const SpectrumTrace& t) {
  RVector m(t.s.size());
  for (int i = 0; i < t.s.size(); ++i) m[i] = std::abs(t.s[i]);
  return m;
}

// Pack/unpack {A, phi, omega0, kappa_mhz} x 2 plus a complex constant
// background {re, im}.
RVector pack(const LorentzianSet& set, Complex background = {0.0, 0.0}) {
  RVector p(10);
  for (int n = 0; n < 2; ++n) {
    p[4 * n + 0] = set[n].amplitude;
    p[4 * n + 1] = set[n].phase;
    p[4 * n + 2] = set[n].omega0_ghz;
    p[4 * n + 3] = set[n].kappa_mhz;
  }
  p[8] = background.real();
  p[9] = background.imag();
  return p;
}

Complex unpack_background(const RVector& p) { return Complex(p[8], p[9]); }

LorentzianSet unpack(const RVector& p) {
  LorentzianSet set(2);
  for (int n = 0; n < 2; ++n) {
    set[n].amplitude = std::abs(p[4 * n + 0]);
    set[n].phase = p[4 * n + 1];
    set[n].omega0_ghz = p[4 * n + 2];
    set[n].kappa_mhz = std::abs(p[4 * n + 3]);
  }
  std::sort(set.begin(), set.end(), [](const Lorentzian& a, const Lorentzian& b) {
    return a.omega0_ghz < b.omega0_ghz;
  });
  return set;
}

}  // namespace

LorentzianSet guess_two_peaks(const SpectrumTrace& trace) {
  trace.validate();
  const RVector raw = magnitudes(trace);
  const int n = static_cast<int>(raw.size());
  // Boxcar smoothing before peak picking: single-sample noise spikes must
  // not outrank a genuine few-linewidth-wide resonance.
  const int half = std::min(2, (n - 1) / 2);
  RVector mag(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half), hi = std::min(n - 1, i + half);
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += raw[j];
    mag[i] = acc / (hi - lo + 1);
  }
  std::vector<bool> masked(n, false);

  auto find_peak = [&]() {
    int best = -1;
    for (int i = 0; i < n; ++i) {
      if (!masked[i] && (best < 0 || mag[i] > mag[best])) best = i;
    }
    return best;
  };
  auto half_width = [&](int peak) {
    const double half = 0.5 * mag[peak];
    int lo = peak, hi = peak;
    while (lo > 0 && mag[lo] > half) --lo;
    while (hi < n - 1 && mag[hi] > half) ++hi;
    double w = trace.freq_ghz[hi] - trace.freq_ghz[lo];
    const double df = trace.freq_ghz[1] - trace.freq_ghz[0];
    return std::max(w, 2.0 * df);
  };

  LorentzianSet guess;
  for (int c = 0; c < 2; ++c) {
    const int peak = find_peak();
    const double kappa_ghz = half_width(peak);
    Lorentzian l;
    l.omega0_ghz = trace.freq_ghz[peak];
    l.kappa_mhz = kappa_ghz * 1e3;
    // |S(omega0)| ~ A / (kappa/2).
    l.amplitude = mag[peak] * 0.5 * kappa_ghz;
    // At resonance the term is A e^{i phi} / (i kappa/2).
    l.phase = trace.magnitude_only
                  ? 0.0
                  : std::arg(trace.s[peak]) + 0.5 * kPi;
    guess.push_back(l);
    const double excl = 3.0 * kappa_ghz;
    for (int i = 0; i < n; ++i) {
      if (std::abs(trace.freq_ghz[i] - l.omega0_ghz) < excl) masked[i] = true;
    }
    if (find_peak() < 0) {  // everything masked: reuse, offset slightly
      for (auto&& m : masked) m = false;
      masked[peak] = true;
    }
  }
  std::sort(guess.begin(), guess.end(), [](const Lorentzian& a, const Lorentzian& b) {
    return a.omega0_ghz < b.omega0_ghz;
  });
  return guess;
}

LorentzianFitResult fit_two_lorentzians(const SpectrumTrace& trace,
                                        const LorentzianSet& guess,
                                        std::uint64_t seed) {
  trace.validate();
  if (guess.size() != 2) throw FitError("fit_two_lorentzians: need a 2-component guess");
  const double fmin = trace.freq_ghz[0];
  const double fmax = trace.freq_ghz[trace.freq_ghz.size() - 1];
  for (const auto& g : guess) {
    if (g.omega0_ghz < fmin || g.omega0_ghz > fmax) {
      throw FitError("fit_two_lorentzians: guess frequency outside the grid span");
    }
  }

  const RVector mag = magnitudes(trace);
  const double floor = 0.01 * mag.maxCoeff();
  const int n = static_cast<int>(mag.size());

  ResidualFn residual;
  if (trace.magnitude_only) {
    residual = [&, floor, n](const RVector& prm) {
      const LorentzianSet set = unpack(prm);
      const Complex bg = unpack_background(prm);
      RVector r(n);
      for (int i = 0; i < n; ++i) {
        const double w = 1.0 / std::max(mag[i], floor);
        const double model2 =
            std::norm(lorentzian_eval(set, trace.freq_ghz[i]) + bg);
        r[i] = (model2 - mag[i] * mag[i]) * w * w;
      }
      return r;
    };
  } else {
    residual = [&, floor, n](const RVector& prm) {
      const LorentzianSet set = unpack(prm);
      const Complex bg = unpack_background(prm);
      RVector r(2 * n);
      for (int i = 0; i < n; ++i) {
        const double w = 1.0 / std::max(mag[i], floor);
        const Complex d =
            lorentzian_eval(set, trace.freq_ghz[i]) + bg - trace.s[i];
        r[2 * i] = d.real() * w;
        r[2 * i + 1] = d.imag() * w;
      }
      return r;
    };
  }

  const RVector p0 = pack(guess);
  RVector spread(10);
  for (int c = 0; c < 2; ++c) {
    spread[4 * c + 0] = 0.3 * std::max(guess[c].amplitude, 1e-6);
    spread[4 * c + 1] = 0.5;
    spread[4 * c + 2] = 2.0 * mhz(guess[c].kappa_mhz);
    spread[4 * c + 3] = 0.5 * std::max(guess[c].kappa_mhz, 1e-3);
  }
  spread[8] = spread[9] = 0.05 * mag.maxCoeff();

  // Reject degenerate "fits" that park a component outside the window, or
  // use one Lorentzian as a window-wide background / sub-resolution spike.
  const double df_mhz = (fmax - fmin) / (n - 1) * 1e3;
  const double span_mhz = (fmax - fmin) * 1e3;
  auto sane = [&](const LorentzianSet& set) {
    for (const Lorentzian& l : set) {
      if (l.omega0_ghz < fmin || l.omega0_ghz > fmax) return false;
      if (l.kappa_mhz < 0.5 * df_mhz || l.kappa_mhz > 0.5 * span_mhz) return false;
    }
    return true;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  LevMarResult best;
  bool have_best = false;
  for (int s = 0; s < 8; ++s) {
    RVector start = p0;
    if (s > 0) {
      for (int j = 0; j < start.size(); ++j) start[j] += spread[j] * unit(rng);
    }
    try {
      LevMarResult lm = levmar(residual, start);
      if (!lm.converged || !sane(unpack(lm.params))) continue;
      if (!have_best || lm.rms < best.rms) {
        best = std::move(lm);
        have_best = true;
      }
    } catch (const FitError&) {
    }
  }
  if (!have_best) throw FitError("fit_two_lorentzians: no convergence");

  LorentzianFitResult out;
  out.set = unpack(best.params);
  out.background = unpack_background(best.params);
  out.rms = best.rms;
  out.converged = true;
  if (std::abs(out.set[0].omega0_ghz - out.set[1].omega0_ghz) < 1e-4) {
    throw FitError("fit_two_lorentzians: mode collapse (frequencies coincide)");
  }
  return out;
}

std::vector<SpectrumTrace> synthesize_sweep(const ModelParams& p,
                                            const std::vector<double>& B_grid,
                                            const RVector& omega_grid,
                                            double noise_level,
                                            std::uint64_t seed) {
  p.validate();
  if (omega_grid.size() < 32) throw DomainError("synthesize_sweep: need >= 32 points");
  const PortMap ports = four_mode_ports(p);
  std::vector<SpectrumTrace> out;
  out.reserve(B_grid.size());
  for (size_t bi = 0; bi < B_grid.size(); ++bi) {
    SpectrumTrace t;
    t.b_mt = B_grid[bi];
    t.freq_ghz = omega_grid;
    t.s.resize(omega_grid.size());
    const CMatrix H = build_four_mode(p, B_grid[bi]);
    double peak = 0.0;
    for (int i = 0; i < omega_grid.size(); ++i) {
      t.s[i] = s_matrix(H, ports, omega_grid[i])(2, 0);
      peak = std::max(peak, std::abs(t.s[i]));
    }
    if (noise_level > 0) {
      // Per-trace derived RNG stream keeps traces independent of ordering.
      std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (bi + 1));
      std::normal_distribution<double> gauss(0.0, noise_level * peak / std::sqrt(2.0));
      for (int i = 0; i < omega_grid.size(); ++i) {
        t.s[i] += Complex(gauss(rng), gauss(rng));
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

SweepTable sweep_extract(const std::vector<SpectrumTrace>& traces,
                         std::uint64_t seed) {
  SweepTable table;
  if (!traces.empty()) table.freq_ghz = traces[0].freq_ghz;
  int failures = 0;
  std::array<Lorentzian, 2> prev{};
  bool have_prev = false;

  for (size_t i = 0; i < traces.size(); ++i) {
    table.B_mt.push_back(traces[i].b_mt);
    LorentzianFitResult fit;
    bool ok = false;
    try {
      LorentzianSet guess = guess_two_peaks(traces[i]);
      if (have_prev) {
        // Try continuity from the previous field point too; keep the better.
        LorentzianSet cont = {prev[0], prev[1]};
        const double fmin = traces[i].freq_ghz[0];
        const double fmax = traces[i].freq_ghz[traces[i].freq_ghz.size() - 1];
        bool inside = true;
        for (const auto& c : cont) {
          inside = inside && c.omega0_ghz >= fmin && c.omega0_ghz <= fmax;
        }
        fit = fit_two_lorentzians(traces[i], guess, seed + i);
        if (inside) {
          try {
            LorentzianFitResult alt = fit_two_lorentzians(traces[i], cont, seed + i);
            if (alt.rms < fit.rms) fit = alt;
          } catch (const FitError&) {
          }
        }
      } else {
        fit = fit_two_lorentzians(traces[i], guess, seed + i);
      }
      ok = true;
    } catch (const FitError&) {
      ++failures;
    }

    if (ok) {
      std::array<Lorentzian, 2> pair = {fit.set[0], fit.set[1]};
      if (have_prev) {
        // 2x2 assignment by frequency continuity.
        const double straight = std::abs(pair[0].omega0_ghz - prev[0].omega0_ghz) +
                                std::abs(pair[1].omega0_ghz - prev[1].omega0_ghz);
        const double crossed = std::abs(pair[0].omega0_ghz - prev[1].omega0_ghz) +
                               std::abs(pair[1].omega0_ghz - prev[0].omega0_ghz);
        if (crossed < straight) std::swap(pair[0], pair[1]);
      }
      table.modes.push_back(pair);
      table.ok.push_back(true);
      table.rms.push_back(fit.rms);
      prev = pair;
      have_prev = true;
    } else {
      table.modes.push_back({});
      table.ok.push_back(false);
      table.rms.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }

  // Backward continuity pass: a weak (noise-buried) mode on one side of the
  // sweep is often trivial to pin down from its twin on the other side, since
  // the mode frequencies are even in B.  Keep whichever fit has lower rms.
  for (int i = static_cast<int>(traces.size()) - 2; i >= 0; --i) {
    if (!table.ok[i + 1]) continue;
    const LorentzianSet cont = {table.modes[i + 1][0], table.modes[i + 1][1]};
    const double fmin = traces[i].freq_ghz[0];
    const double fmax = traces[i].freq_ghz[traces[i].freq_ghz.size() - 1];
    bool inside = true;
    for (const auto& c : cont) {
      inside = inside && c.omega0_ghz >= fmin && c.omega0_ghz <= fmax;
    }
    if (!inside) continue;
    try {
      LorentzianFitResult alt = fit_two_lorentzians(traces[i], cont, seed + i);
      if (!table.ok[i] || alt.rms < table.rms[i]) {
        std::array<Lorentzian, 2> pair = {alt.set[0], alt.set[1]};
        const double straight =
            std::abs(pair[0].omega0_ghz - table.modes[i + 1][0].omega0_ghz) +
            std::abs(pair[1].omega0_ghz - table.modes[i + 1][1].omega0_ghz);
        const double crossed =
            std::abs(pair[0].omega0_ghz - table.modes[i + 1][1].omega0_ghz) +
            std::abs(pair[1].omega0_ghz - table.modes[i + 1][0].omega0_ghz);
        if (crossed < straight) std::swap(pair[0], pair[1]);
        if (!table.ok[i]) --failures;
        table.modes[i] = pair;
        table.ok[i] = true;
        table.rms[i] = alt.rms;
      }
    } catch (const FitError&) {
    }
  }

  if (!traces.empty() &&
      failures * 10 > static_cast<int>(traces.size())) {
    throw FitError("sweep_extract: more than 10% of per-trace fits failed");
  }
  return table;
}

std::array<Lorentzian, 2> predict_prominent_pair(const ModelParams& p, double B_mT) {
  const CMatrix H = build_four_mode(p, B_mT);
  const EigenSystem es = eig_biorthogonal(H);
  const PortMap ports = four_mode_ports(p);
  const LorentzianSet set = lorentzian_decomposition(es, ports, 2, 0);

  // Rank by on-resonance peak height A/(kappa/2): what a spectrum actually
  // shows, not the integrated residue (broad modes have large A but stay
  // buried under the narrow cavity-like peaks).
  auto height = [&](int n) {
    return set[n].amplitude / std::max(0.5 * mhz(set[n].kappa_mhz), 1e-12);
  };
  std::vector<int> idx(set.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return height(a) > height(b);
  });
  std::array<Lorentzian, 2> pair = {set[idx[0]], set[idx[1]]};
  if (pair[0].omega0_ghz > pair[1].omega0_ghz) std::swap(pair[0], pair[1]);
  return pair;
}

namespace {

// Model-side analogue of the data pipeline: synthesize the noiseless trace
// over (a decimated copy of) the measurement grid and refit two Lorentzians,
// so model and data suffer the same truncation of the broad background
// modes.  Falls back to the raw decomposition pair if the refit stalls.
std::array<Lorentzian, 2> refit_prominent_pair(const ModelParams& p, double B_mT,
                                               const RVector& grid,
                                               const CVector* trace_override) {
  std::array<Lorentzian, 2> guess = predict_prominent_pair(p, B_mT);
  const int n = static_cast<int>(grid.size());
  if (n < 32) return guess;

  CVector s(n);
  if (trace_override) {
    s = *trace_override;
  } else {
    const PortMap ports = four_mode_ports(p);
    const CMatrix H = build_four_mode(p, B_mT);
    for (int i = 0; i < n; ++i) s[i] = s_matrix(H, ports, grid[i])(2, 0);
  }
  RVector mag(n);
  for (int i = 0; i < n; ++i) mag[i] = std::abs(s[i]);
  const double floor = 0.01 * mag.maxCoeff();

  auto residual = [&](const RVector& prm) {
    const LorentzianSet set = unpack(prm);
    const Complex bg = unpack_background(prm);
    RVector r(2 * n);
    for (int i = 0; i < n; ++i) {
      const double w = 1.0 / std::max(mag[i], floor);
      const Complex d = lorentzian_eval(set, grid[i]) + bg - s[i];
      r[2 * i] = d.real() * w;
      r[2 * i + 1] = d.imag() * w;
    }
    return r;
  };

  LevMarOptions opts;
  opts.max_iterations = 120;
  const double fmin = grid[0], fmax = grid[n - 1];
  const double df_mhz = (fmax - fmin) / (n - 1) * 1e3;
  const double span_mhz = (fmax - fmin) * 1e3;
  try {
    const LevMarResult lm = levmar(residual, pack({guess[0], guess[1]}), opts);
    const LorentzianSet set = unpack(lm.params);
    bool sane = std::abs(set[0].omega0_ghz - set[1].omega0_ghz) > 1e-4;
    for (const Lorentzian& l : set) {
      sane = sane && l.omega0_ghz >= fmin && l.omega0_ghz <= fmax &&
             l.kappa_mhz >= 0.5 * df_mhz && l.kappa_mhz <= 0.5 * span_mhz;
    }
    if (sane) return {set[0], set[1]};
  } catch (const FitError&) {
  }
  return guess;
}

}  // namespace

GlobalFitResult fit_global_params(const SweepTable& table,
                                  const ModelParams& initial,
                                  const std::vector<std::string>& free_keys,
                                  std::uint64_t seed, int n_starts,
                                  double noise_level, std::uint64_t noise_seed) {
  initial.validate();
  std::vector<double ModelParams::*> members;
  members.reserve(free_keys.size());
  for (const auto& key : free_keys) members.push_back(param_member(key));

  double max_amp = 0.0;
  int n_ok = 0;
  for (size_t i = 0; i < table.size(); ++i) {
    if (!table.ok[i]) continue;
    ++n_ok;
    for (const auto& m : table.modes[i]) max_amp = std::max(max_amp, m.amplitude);
  }
  if (n_ok == 0) throw FitError("fit_global_params: empty table");

  // Trace grid for the model-side refits; kept identical to the measurement
  // grid so the optional common-random-numbers noise lines up sample by
  // sample.
  const RVector& fit_grid = table.freq_ghz;

  auto residual = [&](const RVector& prm) {
    ModelParams p = initial;
    for (size_t j = 0; j < members.size(); ++j) p.*members[j] = prm[static_cast<int>(j)];
    std::vector<double> r;
    r.reserve(table.size() * 6);
    std::vector<SpectrumTrace> sim;
    if (noise_level > 0 && fit_grid.size() >= 32) {
      try {
        p.validate();
        sim = synthesize_sweep(p, table.B_mt, fit_grid, noise_level, noise_seed);
      } catch (const Error&) {
        return RVector::Constant(1, 1e6).eval();
      }
    }
    for (size_t i = 0; i < table.size(); ++i) {
      if (!table.ok[i]) continue;
      std::array<Lorentzian, 2> model;
      try {
        p.validate();
        model = refit_prominent_pair(p, table.B_mt[i], fit_grid,
                                     sim.empty() ? nullptr : &sim[i].s);
      } catch (const Error&) {
        return RVector::Constant(1, 1e6).eval();
      }
      // Match model and data modes by nearest frequency.
      const auto& data = table.modes[i];
      const double straight = std::abs(model[0].omega0_ghz - data[0].omega0_ghz) +
                              std::abs(model[1].omega0_ghz - data[1].omega0_ghz);
      const double crossed = std::abs(model[0].omega0_ghz - data[1].omega0_ghz) +
                             std::abs(model[1].omega0_ghz - data[0].omega0_ghz);
      std::array<int, 2> map = straight <= crossed ? std::array<int, 2>{0, 1}
                                                   : std::array<int, 2>{1, 0};
      // Smoothly saturate each residual: the occasional per-trace fit that
      // latched onto noise must not steer the global objective.
      auto soft = [](double x) {
        const double c = 25.0;
        return x / std::sqrt(1.0 + (x / c) * (x / c));
      };
      for (int n = 0; n < 2; ++n) {
        const Lorentzian& mo = model[n];
        const Lorentzian& da = data[map[n]];
        r.push_back(soft((mo.omega0_ghz - da.omega0_ghz) / 1e-3));  // 1 MHz scale
        r.push_back(soft((mo.kappa_mhz - da.kappa_mhz) /
                         std::max(0.05 * da.kappa_mhz, 0.01)));
        r.push_back(soft((mo.amplitude - da.amplitude) /
                         std::max(0.05 * da.amplitude, 1e-4 * max_amp)));
      }
    }
    return Eigen::Map<RVector>(r.data(), static_cast<int>(r.size())).eval();
  };

  RVector p0(static_cast<int>(members.size()));
  RVector spread(p0.size());
  for (size_t j = 0; j < members.size(); ++j) {
    const double v = initial.*members[j];
    p0[static_cast<int>(j)] = v;
    spread[static_cast<int>(j)] = 0.05 * std::max(std::abs(v), 1.0);
  }

  GlobalFitResult out;
  if (members.empty()) {
    const RVector r = residual(p0);
    out.params = initial;
    out.rms = std::sqrt(r.squaredNorm() / std::max<int>(1, r.size()));
    out.iterations = 0;
    return out;
  }

  LevMarOptions opts;
  // The model side of each residual is itself a converged inner fit; step
  // well above its convergence noise when differencing.
  opts.jacobian_h = 1e-4;
  opts.cost_tol = 1e-10;
  opts.step_tol = 1e-9;
  LevMarResult lm = multistart_levmar(residual, p0, spread, n_starts, seed, opts);
  if (!lm.converged) throw FitError("fit_global_params: no convergence");

  out.params = initial;
  for (size_t j = 0; j < members.size(); ++j) {
    out.params.*members[j] = lm.params[static_cast<int>(j)];
  }
  out.rms = lm.rms;
  out.iterations = lm.iterations;

  // Identifiability: flat directions of the curvature.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lm.jtj);
  const double max_eig = eig.eigenvalues().maxCoeff();
  for (int j = 0; j < eig.eigenvalues().size(); ++j) {
    if (eig.eigenvalues()[j] < 1e-8 * std::max(max_eig, 1e-12)) {
      out.warnings.push_back("unidentifiable parameter direction (flat curvature)");
      break;
    }
  }
  return out;
}

}  // namespace yigcirc
