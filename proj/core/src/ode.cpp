#include "maslov/ode.hpp"

#include <algorithm>
#include <cmath>

namespace maslov {

namespace {

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 35.0 / 384.0 - 5179.0 / 57600.0;
constexpr double e3 = 500.0 / 1113.0 - 7571.0 / 16695.0;
constexpr double e4 = 125.0 / 192.0 - 393.0 / 640.0;
constexpr double e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
constexpr double e6 = 11.0 / 84.0 - 187.0 / 2100.0;
constexpr double e7 = -1.0 / 40.0;

} // namespace

void dopri5_stage(const MatrixRhs& rhs, double t, const Matrix& y, double h, Matrix& y_new,
                  double& err_norm, const OdeOptions& opt) {
  const Matrix k1 = rhs(t, y);
  const Matrix k2 = rhs(t + h / 5.0, Matrix(y + h * (a21 * k1)));
  const Matrix k3 = rhs(t + 3.0 * h / 10.0, Matrix(y + h * (a31 * k1 + a32 * k2)));
  const Matrix k4 = rhs(t + 4.0 * h / 5.0, Matrix(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
  const Matrix k5 =
      rhs(t + 8.0 * h / 9.0, Matrix(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
  const Matrix k6 =
      rhs(t + h, Matrix(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
  y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const Matrix k7 = rhs(t + h, y_new);
  const Matrix err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

  err_norm = 0.0;
  for (int j = 0; j < y.cols(); ++j)
    for (int i = 0; i < y.rows(); ++i) {
      const double scale =
          opt.atol + opt.rtol * std::max(std::abs(y(i, j)), std::abs(y_new(i, j)));
      err_norm = std::max(err_norm, std::abs(err(i, j)) / scale);
    }
}

double dopri5_next_h(double h, double err_norm) {
  const double factor =
      err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
  return h * std::clamp(factor, 0.2, 5.0);
}

} // namespace maslov
