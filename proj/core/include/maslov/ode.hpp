#ifndef MASLOV_ODE_HPP
#define MASLOV_ODE_HPP

#include "maslov/types.hpp"

#include <functional>

namespace maslov {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0; // 0 = choose from tolerances
  double h_max = 0.5;
  double h_min = 1e-13;
  long max_steps = 5'000'000;
};

using MatrixRhs = std::function<Matrix(double, const Matrix&)>;

/// One embedded Dormand-Prince 5(4) step from (t, y) with signed step h.
/// Fills y_new and the scaled error norm (<= 1 means acceptable).
void dopri5_stage(const MatrixRhs& rhs, double t, const Matrix& y, double h, Matrix& y_new,
                  double& err_norm, const OdeOptions& opt);

/// Suggested next step size from the scaled error of the last attempt.
double dopri5_next_h(double h, double err_norm);

} // namespace maslov

#endif
