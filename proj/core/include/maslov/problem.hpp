#ifndef MASLOV_PROBLEM_HPP
#define MASLOV_PROBLEM_HPP

#include "maslov/symplectic.hpp"
#include "maslov/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace maslov {

using MatrixFn = std::function<Matrix(double)>;

/// Coefficients of -(P phi')' + V phi = lambda Q phi on [0, inf).
/// Evaluators are supplied together with their endstates and the decay
/// rate eta; the positivity constants theta_P, theta_Q and the bound C_V
/// are declared by the model author and spot-checked on sample grids.
struct CoefficientModel {
  int n = 0;
  MatrixFn P, V, Q;
  MatrixFn Pprime; // optional, may be null
  Matrix P_plus, V_plus, Q_plus;
  double eta = 0.0;
  double theta_P = 0.0;
  double theta_Q = 0.0;
  double C_V = 0.0;

  static CoefficientModel constant(const Matrix& P0, const Matrix& V0, const Matrix& Q0);
};

/// alpha1 phi(0) + alpha2 P(0) phi'(0) = 0 with rank(alpha1 alpha2) = n and
/// alpha J alpha* = 0.
struct BoundaryCondition {
  Matrix alpha1, alpha2;

  int dim() const { return static_cast<int>(alpha1.rows()); }
  /// n x 2n concatenation (alpha1 alpha2).
  Matrix alpha() const;
  /// alpha J alpha* = alpha2 alpha1* - alpha1 alpha2*.
  Matrix selfadjointness_defect() const;

  static BoundaryCondition dirichlet(int n);
  static BoundaryCondition neumann(int n);
};

/// Orthogonal splitting of the vertex condition into Dirichlet, Neumann
/// and Robin parts: P_D phi(0) = 0, P_N P(0)phi'(0) = 0,
/// P_R P(0)phi'(0) = P_R Lambda P_R phi(0).
struct VertexProjectors {
  Matrix P_D, P_N, P_R;
  Matrix Lambda; // Hermitian, supported on range(P_R)
  double C_b = 0.0; // ||P_R Lambda P_R||
  int robin_rank = 0;
};

struct HalfLineSystem {
  CoefficientModel model;
  BoundaryCondition bc;
};

struct ValidationIssue {
  std::string quantity;
  double x = 0.0;
  double margin = 0.0; // negative = violated
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  std::vector<ValidationIssue> violations;
  double worst_positivity_P = 0.0; // min over grid of (lambda_min(P) - theta_P)
  double worst_positivity_Q = 0.0;
  double worst_bound_V = 0.0;      // min over grid of (C_V - ||V||)
  double worst_hermitian = 0.0;    // max Hermitian defect seen
  double decay_envelope = 0.0;     // largest implied decay constant
  std::string summary() const;
};

/// Spot-checks A1-A3 on the sample grid; throws nothing, reports everything.
ValidationReport validate_system(const CoefficientModel& model, const BoundaryCondition& bc,
                                 const std::vector<double>& sample_grid);

/// P_D = projection onto ker(alpha2), P_N onto ker(alpha1), P_R the rest;
/// Lambda recovered by least squares on range(P_R).
VertexProjectors vertex_projectors(const BoundaryCondition& bc);

/// J alpha* = (-alpha2*; alpha1*), the boundary plane at x = 0.
LagrangianFrame initial_frame(const BoundaryCondition& bc);

/// 2n x 2n Hamiltonian coefficient diag(lambda Q - V, P^{-1}).
Matrix hamiltonian_B(const CoefficientModel& model, double x, double lambda);

/// d/dlambda of hamiltonian_B: diag(Q, 0).
Matrix hamiltonian_B_lambda(const CoefficientModel& model, double x);

/// Right-hand side of the frame ODE y' = A y, A = -J B.
Matrix hamiltonian_A(const CoefficientModel& model, double x, double lambda);

} // namespace maslov

#endif
