#ifndef MASLOV_TYPES_HPP
#define MASLOV_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace maslov {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A declared model assumption failed (positivity, self-adjointness, rank, ...).
class AssumptionError : public Error {
public:
  using Error::Error;
};

/// The numerics broke down (step underflow, unconverged count, near-singular factor).
class NumericalError : public Error {
public:
  using Error::Error;
};

/// A signature computation hit an eigenvalue inside the zero threshold.
class DegenerateSignatureError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Standard symplectic matrix J = ((0, -I), (I, 0)) on C^{2n}.
Matrix symplectic_J(int n);

/// Spectral norm (largest singular value).
double operator_norm(const Matrix& a);

/// ||A - A*||, absolute.
double hermitian_defect(const Matrix& a);

inline Matrix hermitize(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

/// Principal angle in (-pi, pi].
double wrap_angle(double theta);

} // namespace maslov

#endif
