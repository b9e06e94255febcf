#include "maslov/evolution.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace maslov {

namespace {

// Sine of the largest principal angle between the spans of two orthonormal
// 2n x n matrices.
double subspace_angle_sin(const Matrix& q0, const Matrix& q1) {
  const Matrix resid = q1 - q0 * (q0.adjoint() * q1);
  return operator_norm(resid);
}

struct EvolveResult {
  std::vector<double> xs;
  std::vector<Matrix> qs; // orthonormalized stacked frames
  std::vector<StepRecord> log;
};

// Adaptive Dormand-Prince on the stacked frame with QR renormalization after
// each accepted step. x1 < x0 integrates backward.
EvolveResult evolve_frame(const std::function<Matrix(double)>& a_of_x, const Matrix& f0,
                          double x0, double x1, const EvolveOptions& opts) {
  const MatrixRhs rhs = [&a_of_x](double x, const Matrix& y) -> Matrix { return a_of_x(x) * y; };

  EvolveResult out;
  Matrix q = f0;
  {
    Eigen::HouseholderQR<Matrix> qr(q);
    q = qr.householderQ() * Matrix::Identity(q.rows(), q.cols());
  }
  out.xs.push_back(x0);
  out.qs.push_back(q);

  const double span = x1 - x0;
  if (span == 0.0) return out;
  const double dir = span > 0.0 ? 1.0 : -1.0;
  double h = opts.ode.h_init != 0.0 ? opts.ode.h_init * dir
                                    : dir * std::min(opts.ode.h_max, std::abs(span) / 100.0);
  double x = x0;
  long steps = 0;

  Matrix y_new;
  const double arrival_slack =
      4.0 * std::numeric_limits<double>::epsilon() * std::max({std::abs(x0), std::abs(x1), 1.0});
  while (dir * (x1 - x) > arrival_slack) {
    if (++steps > opts.ode.max_steps)
      throw NumericalError("evolve_frame: step budget exhausted");
    if (std::abs(h) < opts.ode.h_min) {
      std::ostringstream os;
      os << "evolve_frame: step size underflow at x=" << x << " (stiffness?)";
      throw NumericalError(os.str());
    }
    if (dir * (x + h - x1) > 0.0) h = x1 - x; // clamp final step

    double err = 0.0;
    dopri5_stage(rhs, x, q, h, y_new, err, opts.ode);
    if (err > 1.0) {
      h = dopri5_next_h(h, err);
      continue;
    }

    // renormalize, then enforce the per-step subspace rotation cap
    Eigen::HouseholderQR<Matrix> qr(y_new);
    Matrix q_new = qr.householderQ() * Matrix::Identity(y_new.rows(), y_new.cols());
    const double drift = subspace_angle_sin(q, q_new);
    if (drift > opts.angle_cap && std::abs(h) > opts.ode.h_min * 4.0) {
      h *= 0.5;
      continue;
    }

    x += h;
    q = q_new;
    out.xs.push_back(x);
    out.qs.push_back(q);
    const double defect =
        operator_norm(Matrix(q.adjoint() * symplectic_J(static_cast<int>(q.cols())) * q));
    out.log.push_back({x, h, defect, drift});
    h = std::min(std::abs(dopri5_next_h(h, err)), opts.ode.h_max) * dir;
  }
  return out;
}

FramePath make_path(EvolveResult&& r, double lambda, FramePath::Direction direction,
                    std::function<Matrix(double)> rhs, const OdeOptions& ode) {
  FramePath path;
  path.lambda = lambda;
  path.direction = direction;
  path.rhs = std::move(rhs);
  path.ode = ode;
  path.renormalization_log = std::move(r.log);
  // store ascending in x regardless of integration direction
  const bool reversed = r.xs.size() > 1 && r.xs.back() < r.xs.front();
  path.grid.resize(r.xs.size());
  path.frames.resize(r.xs.size());
  for (size_t k = 0; k < r.xs.size(); ++k) {
    const size_t src = reversed ? r.xs.size() - 1 - k : k;
    path.grid[k] = r.xs[src];
    path.frames[k] = LagrangianFrame::from_stacked(r.qs[src]);
  }
  return path;
}

} // namespace

LagrangianFrame FramePath::at(double x) const {
  if (grid.empty()) throw Error("FramePath::at: empty path");
  const double span = std::max(grid.back() - grid.front(), 1e-300);
  const double slack = 1e-9 * span + 1e-12;
  if (x < grid.front() - slack || x > grid.back() + slack)
    throw NumericalError("FramePath::at: x outside the stored range");
  x = std::clamp(x, grid.front(), grid.back());

  // nearest stored sample on the side the integration came from
  const auto it = std::lower_bound(grid.begin(), grid.end(), x);
  size_t idx;
  if (it == grid.end())
    idx = grid.size() - 1;
  else if (direction == Direction::forward)
    idx = (it == grid.begin() || *it == x) ? static_cast<size_t>(it - grid.begin())
                                           : static_cast<size_t>(it - grid.begin()) - 1;
  else
    idx = static_cast<size_t>(it - grid.begin());

  if (std::abs(grid[idx] - x) <= 1e-14 * span) return frames[idx];

  EvolveOptions opts;
  opts.ode = ode;
  opts.angle_cap = 1.0; // local re-integration, cap not needed
  const auto r = evolve_frame([this](double xx) { return rhs(xx); },
                              frames[idx].stacked(), grid[idx], x, opts);
  return LagrangianFrame::from_stacked(r.qs.back());
}

double FramePath::max_defect() const {
  double d = 0.0;
  for (const auto& rec : renormalization_log) d = std::max(d, rec.defect);
  for (const auto& f : frames) d = std::max(d, f.symplectic_defect());
  return d;
}

FramePath evolve_boundary_frame(const HalfLineSystem& sys, double lambda,
                                std::pair<double, double> x_span, const EvolveOptions& opts) {
  const auto model = sys.model;
  auto a_of_x = [model, lambda](double x) { return hamiltonian_A(model, x, lambda); };
  auto r = evolve_frame(a_of_x, initial_frame(sys.bc).stacked(), x_span.first, x_span.second,
                        opts);
  return make_path(std::move(r), lambda, FramePath::Direction::forward, a_of_x, opts.ode);
}

FramePath evolve_decaying_frame(const HalfLineSystem& sys, double lambda,
                                const TruncationConfig& trunc, const EvolveOptions& opts) {
  const auto model = sys.model;
  const double dev =
      std::max({operator_norm(Matrix(model.P(trunc.x_inf) - model.P_plus)),
                operator_norm(Matrix(model.V(trunc.x_inf) - model.V_plus)),
                operator_norm(Matrix(model.Q(trunc.x_inf) - model.Q_plus))});
  if (dev > trunc.settle_tol) {
    std::ostringstream os;
    os << "evolve_decaying_frame: coefficients not settled at x_inf=" << trunc.x_inf
       << " (deviation " << dev << " > " << trunc.settle_tol << ")";
    throw NumericalError(os.str());
  }
  const AsymptoticData asym = asymptotic_data(model, lambda); // throws for lambda >= kappa
  auto a_of_x = [model, lambda](double x) { return hamiltonian_A(model, x, lambda); };
  auto r = evolve_frame(a_of_x, asym.frame_decay.stacked(), trunc.x_inf, 0.0, opts);
  return make_path(std::move(r), lambda, FramePath::Direction::backward, a_of_x, opts.ode);
}

TruncationConfig settle_truncation(const HalfLineSystem& sys,
                                   std::pair<double, double> lambda_range,
                                   const SettleOptions& opts) {
  const auto& model = sys.model;
  if (model.eta <= 0.0) throw AssumptionError("settle_truncation: eta must be positive");

  TruncationConfig cfg;
  cfg.settle_tol = opts.settle_tol;
  cfg.max_x = opts.max_x;
  cfg.x_inf = std::max(-std::log(opts.settle_tol) / model.eta, 10.0);

  auto settled = [&](double x) {
    return std::max({operator_norm(Matrix(model.P(x) - model.P_plus)),
                     operator_norm(Matrix(model.V(x) - model.V_plus)),
                     operator_norm(Matrix(model.Q(x) - model.Q_plus))}) <= opts.settle_tol;
  };
  while (!settled(cfg.x_inf)) {
    cfg.x_inf *= opts.grow;
    if (cfg.x_inf > opts.max_x)
      throw NumericalError("settle_truncation: max_x exceeded before coefficients settle");
  }

  // Self-consistency probe: a 25% larger truncation must not move the
  // eigenangles of the pair matrix against the boundary plane at x = 0.
  const LagrangianFrame ell1 = initial_frame(sys.bc);
  EvolveOptions eopts;
  eopts.ode = opts.ode;
  auto angles_at_zero = [&](double lambda, double x_inf) {
    TruncationConfig probe = cfg;
    probe.x_inf = x_inf;
    const FramePath path = evolve_decaying_frame(sys, lambda, probe, eopts);
    return unitary_eigenangles(pair_matrix(ell1, path.at(0.0)).W);
  };
  for (;;) {
    double worst = 0.0;
    for (double lambda : {lambda_range.first, lambda_range.second}) {
      const auto base = angles_at_zero(lambda, cfg.x_inf);
      const auto probe = angles_at_zero(lambda, cfg.x_inf * 1.25);
      for (double a : base) {
        double best = 2.0 * M_PI;
        for (double b : probe) best = std::min(best, std::abs(wrap_angle(a - b)));
        worst = std::max(worst, best);
      }
    }
    if (worst < opts.settle_tol) break;
    cfg.x_inf *= opts.grow;
    if (cfg.x_inf * 1.25 > opts.max_x)
      throw NumericalError("settle_truncation: max_x exceeded during self-consistency probe");
  }
  return cfg;
}

void framepath_to_csv(const FramePath& path, std::ostream& os) {
  os << "x";
  const int n = path.frames.empty() ? 0 : path.frames.front().dim();
  for (int i = 0; i < 2 * n; ++i)
    for (int j = 0; j < n; ++j) os << ",re_" << i << j << ",im_" << i << j;
  os << ",defect\n";
  for (size_t k = 0; k < path.grid.size(); ++k) {
    os << path.grid[k];
    const Matrix s = path.frames[k].stacked();
    for (int i = 0; i < s.rows(); ++i)
      for (int j = 0; j < s.cols(); ++j)
        os << "," << s(i, j).real() << "," << s(i, j).imag();
    os << "," << path.frames[k].symplectic_defect() << "\n";
  }
}

} // namespace maslov
