#include "yigcirc/model.hpp"

#include <cmath>

namespace yigcirc {

double beta_of_field(const ModelParams& p, double B_mT) {
  // |B| keeps beta(B) == beta(-B) bit-exact.
  return p.beta_0 / std::cosh(std::abs(B_mT) / p.B_0);
}

double coupling_gx(const ModelParams& p, double B_mT) {
  return p.g_x0 + p.g_x1 * beta_of_field(p, B_mT);
}

double coupling_gy(const ModelParams& p, double B_mT) {
  return p.g_y0 + p.g_y1 * beta_of_field(p, B_mT);
}

CMatrix build_two_mode(const ModelParams& p, double B_mT) {
  p.validate();
  const double beta = mhz(beta_of_field(p, B_mT));  // GHz
  const double theta = p.theta_deg * kPi / 180.0;
  const double B_T = B_mT * 1e-3;
  const double kB = p.k * B_T;           // GHz
  const double shift = p.m * (B_T * B_T);  // GHz

  CMatrix H(2, 2);
  H(0, 0) = p.omega_x + beta * std::cos(theta) + shift;
  H(0, 1) = Complex(beta * std::sin(theta), kB);
  H(1, 0) = Complex(beta * std::sin(theta), -kB);
  H(1, 1) = p.omega_y - beta * std::cos(theta) + shift;
  return H;
}

CMatrix build_four_mode(const ModelParams& p, double B_mT) {
  p.validate();
  const double beta = mhz(beta_of_field(p, B_mT));  // GHz
  const double theta = p.theta_deg * kPi / 180.0;
  const double B_T = B_mT * 1e-3;
  const double kB = p.k * B_T;
  const double shift = p.m * (B_T * B_T);
  const double gx = mhz(coupling_gx(p, B_mT));
  const double gy = mhz(coupling_gy(p, B_mT));

  CMatrix H = CMatrix::Zero(4, 4);
  H(0, 0) = Complex(p.omega_1, -0.5 * mhz(p.kappa_1));
  H(1, 1) = Complex(p.omega_2, -0.5 * mhz(p.kappa_2));
  H(2, 2) = Complex(p.omega_y - beta * std::cos(theta) + shift,
                    -0.5 * mhz(p.kappa_3));
  H(3, 3) = Complex(p.omega_x + beta * std::cos(theta) + shift,
                    -0.5 * mhz(p.kappa_x));

  H(0, 2) = gy;
  H(2, 0) = gy;
  H(1, 2) = gy;
  H(2, 1) = gy;
  H(0, 3) = gx;
  H(3, 0) = gx;
  H(1, 3) = -gx;
  H(3, 1) = -gx;

  H(2, 3) = Complex(beta * std::sin(theta), -kB);
  H(3, 2) = Complex(beta * std::sin(theta), kB);
  return H;
}

double magnetization_of_field(double B_mT, double Ms, double Nz) {
  if (!(Ms > 0) || !(Nz > 0) || !(Nz < 1)) {
    throw DomainError("magnetization_of_field: require Ms > 0 and 0 < Nz < 1");
  }
  const double ramp = std::abs(B_mT) * 1e-3 / (kMu0 * Nz);
  const double mag = std::min(ramp, Ms);
  return B_mT < 0 ? -mag : mag;
}

}  // namespace yigcirc
