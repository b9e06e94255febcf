#ifndef MASLOV_EVOLUTION_HPP
#define MASLOV_EVOLUTION_HPP

#include "maslov/asymptotics.hpp"
#include "maslov/ode.hpp"
#include "maslov/problem.hpp"

#include <iosfwd>
#include <utility>
#include <vector>

namespace maslov {

struct TruncationConfig {
  double x_inf = 0.0;
  double settle_tol = 1e-8;
  double max_x = 200.0;
};

struct SettleOptions {
  double settle_tol = 1e-8;
  double max_x = 200.0;
  double grow = 1.25;
  OdeOptions ode;
};

struct EvolveOptions {
  OdeOptions ode;
  double angle_cap = 0.05; // max subspace rotation per accepted step, radians
};

struct StepRecord {
  double x = 0.0;
  double h = 0.0;
  double defect = 0.0;     // Lagrangian defect after renormalization
  double drift = 0.0;      // subspace angle moved in this step
};

/// Frames along an evolution J X' = B(x; lambda) X, stored orthonormalized on
/// an ascending grid. at(x) re-integrates from the nearest stored sample on
/// the stable side (below for forward paths, above for backward ones).
struct FramePath {
  enum class Direction { forward, backward };

  std::vector<double> grid;
  std::vector<LagrangianFrame> frames;
  double lambda = 0.0;
  Direction direction = Direction::forward;
  std::vector<StepRecord> renormalization_log;

  std::function<Matrix(double)> rhs; // A(x) at this lambda
  OdeOptions ode;

  LagrangianFrame at(double x) const;
  double max_defect() const;
  double x_min() const { return grid.front(); }
  double x_max() const { return grid.back(); }
};

/// Integrates the boundary frame J alpha* forward over x_span with thin-QR
/// renormalization after every accepted step.
FramePath evolve_boundary_frame(const HalfLineSystem& sys, double lambda,
                                std::pair<double, double> x_span,
                                const EvolveOptions& opts = {});

/// Seeds at trunc.x_inf with the asymptotic decaying frame and integrates
/// backward to 0. Requires lambda < kappa and settled coefficients at x_inf.
FramePath evolve_decaying_frame(const HalfLineSystem& sys, double lambda,
                                const TruncationConfig& trunc, const EvolveOptions& opts = {});

/// Chooses x_inf so the coefficients are settled and a 25% larger truncation
/// moves the downstream pair-matrix eigenangles by less than settle_tol at
/// both ends of lambda_range.
TruncationConfig settle_truncation(const HalfLineSystem& sys,
                                   std::pair<double, double> lambda_range,
                                   const SettleOptions& opts = {});

/// CSV dump: x, frame entries (re, im interleaved), defect.
void framepath_to_csv(const FramePath& path, std::ostream& os);

} // namespace maslov

#endif
