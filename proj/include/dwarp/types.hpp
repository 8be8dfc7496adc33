#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dwarp {

using Real = double;
using Complex = std::complex<double>;

using VectorXr = Eigen::VectorXd;
using VectorXc = Eigen::VectorXcd;
using MatrixXr = Eigen::MatrixXd;
using MatrixXc = Eigen::MatrixXcd;

inline constexpr Real kPi = 3.14159265358979323846264338327950288;
inline constexpr Complex kI{0.0, 1.0};

// Error hierarchy. Everything thrown by the library derives from Error.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation of a warp or weight produced a non-finite or singular value.
struct DomainError : Error {
  using Error::Error;
};

// Malformed partial-wave index or out-of-range quantum numbers.
struct IndexError : Error {
  using Error::Error;
};

// Numerical configuration that cannot be honoured (coarse quadrature,
// non-positive discrete operator, insufficient domain, ...).
struct ConfigurationError : Error {
  using Error::Error;
};

// Nonlinear evolution produced non-finite values.
struct BlowUpError : Error {
  BlowUpError(const std::string& what, Real time) : Error(what), time(time) {}
  Real time;
};

// Picard iteration failed to contract on the requested interval.
struct NoContractionError : Error {
  using Error::Error;
};

}  // namespace dwarp
