#include "yigcirc/scattering.hpp"

#include <algorithm>
#include <cmath>

namespace yigcirc {

PortMap four_mode_ports(const ModelParams& p) {
  return {{0, p.kappa_1}, {1, p.kappa_2}, {2, p.kappa_3}};
}

Complex lorentzian_eval(const LorentzianSet& set, double omega_ghz) {
  Complex out = 0.0;
  for (const auto& l : set) {
    const Complex pole(l.omega0_ghz, -0.5 * mhz(l.kappa_mhz));
    out += std::polar(l.amplitude, l.phase) / (omega_ghz - pole);
  }
  return out;
}

CMatrix greens_function(const CMatrix& H, double omega_ghz) {
  if (H.rows() != H.cols()) throw DomainError("greens_function: matrix not square");
  const int n = static_cast<int>(H.rows());
  const CMatrix A = omega_ghz * CMatrix::Identity(n, n) - H;
  Eigen::PartialPivLU<CMatrix> lu(A);
  CMatrix G = lu.solve(CMatrix::Identity(n, n));
  if (!G.allFinite()) {
    throw SingularError("greens_function: singular at this frequency");
  }
  const double residual = (A * G - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (residual > 1e-8) {
    throw SingularError("greens_function: ill-conditioned inversion, residual " +
                        std::to_string(residual));
  }
  return G;
}

CMatrix s_matrix(const CMatrix& H, const PortMap& ports, double omega_ghz) {
  const int np = static_cast<int>(ports.size());
  for (const auto& port : ports) {
    if (port.mode_index < 0 || port.mode_index >= H.rows()) {
      throw DomainError("s_matrix: port mode index out of range");
    }
    if (port.kappa_mhz < 0) throw DomainError("s_matrix: negative port coupling");
  }
  const CMatrix G = greens_function(H, omega_ghz);
  CMatrix S = CMatrix::Identity(np, np);
  const Complex mi(0.0, -1.0);
  for (int i = 0; i < np; ++i) {
    for (int j = 0; j < np; ++j) {
      const double root = std::sqrt(mhz(ports[i].kappa_mhz) * mhz(ports[j].kappa_mhz));
      S(i, j) += mi * root * G(ports[i].mode_index, ports[j].mode_index);
    }
  }
  return S;
}

LorentzianSet lorentzian_decomposition(const CMatrix& H, const PortMap& ports,
                                       int out_port, int in_port) {
  return lorentzian_decomposition(eig_biorthogonal(H), ports, out_port, in_port);
}

LorentzianSet lorentzian_decomposition(const EigenSystem& es, const PortMap& ports,
                                       int out_port, int in_port) {
  if (out_port < 0 || out_port >= static_cast<int>(ports.size()) || in_port < 0 ||
      in_port >= static_cast<int>(ports.size())) {
    throw DomainError("lorentzian_decomposition: port index out of range");
  }
  const int out_mode = ports[out_port].mode_index;
  const int in_mode = ports[in_port].mode_index;
  const double root =
      std::sqrt(mhz(ports[out_port].kappa_mhz) * mhz(ports[in_port].kappa_mhz));
  LorentzianSet set;
  set.reserve(es.size());
  for (int n = 0; n < es.size(); ++n) {
    // Residue of S_{out,in} at omega_n: -i sqrt(k_out k_in) <out|nR><nL|in>.
    const Complex weight = Complex(0.0, -1.0) * root * es.right(out_mode, n) *
                           std::conj(es.left(in_mode, n));
    Lorentzian l;
    l.amplitude = std::abs(weight);
    l.phase = std::arg(weight);
    l.omega0_ghz = es.values[n].real();
    l.kappa_mhz = -2.0 * es.values[n].imag() * 1e3;
    set.push_back(l);
  }
  return set;
}

double isolation_db(Complex s_plus, Complex s_minus) {
  const double num = std::abs(s_plus);
  const double den = std::abs(s_minus);
  if (den < 1e-15) {
    if (num < 1e-15) {
      throw SingularError("isolation_db: both transmissions negligible");
    }
    return 120.0;
  }
  const double db = 20.0 * std::log10(num / den);
  return std::clamp(db, -120.0, 120.0);
}

CMatrix three_port_circulator(double omega0_ghz, double delta_mhz,
                              double kappa_c_mhz, double kappa_i_mhz,
                              double omega_ghz, int chirality) {
  if (!(kappa_c_mhz > 0)) throw DomainError("three_port_circulator: kappa_c must be > 0");
  if (chirality != 1 && chirality != -1) {
    throw DomainError("three_port_circulator: chirality must be +-1");
  }
  const double delta = mhz(delta_mhz);
  const double kappa_c = mhz(kappa_c_mhz);
  const double kappa_i = mhz(kappa_i_mhz);
  // Each rotating mode decays into the three ports with equal strength; total
  // external full linewidth 2*kappa_c (half-linewidth kappa_c).
  const double per_port = 2.0 * kappa_c / 3.0;
  const double kappa_tot = 2.0 * kappa_c + kappa_i;

  const Complex g_plus = 1.0 / (omega_ghz - (omega0_ghz + 0.5 * delta) +
                                Complex(0.0, 0.5 * kappa_tot));
  const Complex g_minus = 1.0 / (omega_ghz - (omega0_ghz - 0.5 * delta) +
                                 Complex(0.0, 0.5 * kappa_tot));

  CMatrix S = CMatrix::Identity(3, 3);
  for (int p = 0; p < 3; ++p) {
    for (int q = 0; q < 3; ++q) {
      const double phi = -chirality * 2.0 * kPi * (p - q) / 3.0;
      const Complex term = std::polar(1.0, phi) * g_plus +
                           std::polar(1.0, -phi) * g_minus;
      S(p, q) += Complex(0.0, -1.0) * per_port * term;
    }
  }
  return S;
}

InsertionLoss insertion_loss(const CMatrix& S) {
  if (S.rows() != 3 || S.cols() != 3) {
    throw DomainError("insertion_loss: expected a 3x3 S-matrix");
  }
  const double t = std::norm(S(1, 0));
  const double refl = std::norm(S(0, 0));
  const double iso = std::norm(S(2, 0));
  return InsertionLoss{1.0 - t, 1.0 - t - refl - iso};
}

}  // namespace yigcirc
