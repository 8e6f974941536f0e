#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nlsv {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;

inline constexpr cplx I{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a numerical result fails its own consistency gate.
class NumericalError : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionError(what);
}

inline double japanese(double x) { return std::sqrt(1.0 + x * x); }

}  // namespace nlsv
