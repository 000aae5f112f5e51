#include "yigcirc/ferrite.hpp"

#include <cmath>

namespace yigcirc {

void FerriteParams::validate() const {
  if (!(Ms > 0)) throw DomainError("FerriteParams: Ms must be > 0");
  if (std::abs(Nx + Ny + Nz - 1.0) > 1e-6) {
    throw DomainError("FerriteParams: demag factors must sum to 1");
  }
}

double oersted_to_si(double oe) { return oe * 1e3 / (4.0 * kPi); }

double kittel_frequency(const FerriteParams& p, double B_mT) {
  p.validate();
  const double n_xy = 0.5 * (p.Nx + p.Ny);
  return p.gamma * (B_mT * 1e-3 + kMu0 * (n_xy - p.Nz) * p.Ms);
}

PermeabilityTensor polder_tensor(double omega_ghz, double H0, double Ms,
                                 double gamma) {
  const double omega0 = gamma * kMu0 * H0;  // GHz
  const double omega_m = gamma * kMu0 * Ms;
  if (std::abs(omega_ghz - omega0) < 1e-9) {
    throw DomainError("polder_tensor: on the resonance pole");
  }
  const double denom = omega0 * omega0 - omega_ghz * omega_ghz;
  const double mu_r = 1.0 + omega0 * omega_m / denom;
  const double kappa = omega_ghz * omega_m / denom;

  PermeabilityTensor T = PermeabilityTensor::Identity();
  T(0, 0) = mu_r;
  T(1, 1) = mu_r;
  T(0, 1) = Complex(0.0, kappa);
  T(1, 0) = Complex(0.0, -kappa);
  return T;
}

namespace {

double demagnetized_mu(double omega_ghz, double omega_m_ghz) {
  if (!(omega_ghz > std::abs(omega_m_ghz))) {
    throw DomainError("ferrite: require omega > omega_m");
  }
  const double x = omega_m_ghz / omega_ghz;
  return std::sqrt(1.0 - x * x);
}

}  // namespace

PermeabilityTensor sandy_green_tensor(double omega_ghz, double Mp, double Ms,
                                      double gamma) {
  if (!(Ms > 0)) throw DomainError("sandy_green_tensor: Ms must be > 0");
  if (std::abs(Mp) > Ms * (1.0 + 1e-12)) {
    throw DomainError("sandy_green_tensor: |Mp| exceeds Ms");
  }
  const double omega_m = gamma * kMu0 * Ms;  // GHz
  if (!(omega_ghz > omega_m)) {
    throw DomainError("sandy_green_tensor: require omega > omega_m");
  }
  const double frac = std::abs(Mp) / Ms;
  const double mu_d = 1.0 / 3.0 + 2.0 / 3.0 * demagnetized_mu(omega_ghz, omega_m);
  const double mu_p = mu_d + (1.0 - mu_d) * std::pow(frac, 1.5);
  // Polder kappa in the zero internal field limit.
  const double kappa = -omega_m / omega_ghz;
  const double kappa_p = kappa * (Mp / Ms);
  const double mu_z = std::pow(mu_d, std::pow(1.0 - frac, 2.5));

  PermeabilityTensor T = PermeabilityTensor::Zero();
  T(0, 0) = mu_p;
  T(1, 1) = mu_p;
  T(2, 2) = mu_z;
  T(0, 1) = Complex(0.0, kappa_p);
  T(1, 0) = Complex(0.0, -kappa_p);
  return T;
}

PermeabilityTensor demagnetized_tensor(double omega_ghz, double omega_m_ghz) {
  const double mu_eff = demagnetized_mu(omega_ghz, omega_m_ghz);
  PermeabilityTensor T = PermeabilityTensor::Identity();
  T(0, 0) = mu_eff;
  T(1, 1) = mu_eff;
  return T;
}

PermeabilityTensor anisotropic_weighted_tensor(double omega_ghz,
                                               double omega_m_ghz,
                                               double delta) {
  if (std::abs(delta) > 1.0 / 3.0 + 1e-12) {
    throw DomainError("anisotropic_weighted_tensor: |delta| must be <= 1/3");
  }
  const PermeabilityTensor mu_z = demagnetized_tensor(omega_ghz, omega_m_ghz);

  // Coordinate rotations mapping the z domain axis onto x and y.
  Eigen::Matrix3d Rx;  // rotation about y by +90 deg: z -> x
  Rx << 0, 0, 1, 0, 1, 0, -1, 0, 0;
  Eigen::Matrix3d Ry;  // rotation about x by -90 deg: z -> y
  Ry << 1, 0, 0, 0, 0, 1, 0, -1, 0;

  const PermeabilityTensor mu_x = Rx.cast<Complex>() * mu_z * Rx.transpose().cast<Complex>();
  const PermeabilityTensor mu_y = Ry.cast<Complex>() * mu_z * Ry.transpose().cast<Complex>();

  return (1.0 / 3.0 + delta) * mu_x + (1.0 / 3.0 - delta) * mu_y +
         (1.0 / 3.0) * mu_z;
}

}  // namespace yigcirc
