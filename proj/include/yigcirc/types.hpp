#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace yigcirc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kMu0 = 4.0e-7 * 3.14159265358979323846;  // T·m/A
inline constexpr double kPi = 3.14159265358979323846;

// MHz -> GHz for linewidths/couplings entering GHz-valued matrices.
inline double mhz(double x) { return x * 1e-3; }

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error {
  using Error::Error;
};

struct SingularError : Error {
  using Error::Error;
};

struct FitError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace yigcirc
