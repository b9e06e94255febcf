#ifndef MASLOV_FD_ORACLE_HPP
#define MASLOV_FD_ORACLE_HPP

#include "maslov/problem.hpp"

#include <string>
#include <vector>

namespace maslov {

/// Conservative second-order finite-difference discretization of the system
/// on [0, L] with the vertex condition at 0 (projector form, ghost-free
/// energy assembly) and Dirichlet at L. Hermitian block-tridiagonal pencil
/// (A, M) with M positive definite.
struct Discretization {
  double L = 0.0;
  int N = 0;
  double h = 0.0;
  int n = 0;          // system size per node
  int node0_dim = 0;  // unknowns kept at the vertex node
  Matrix basis0;      // n x node0_dim basis of the admissible vertex values
  std::vector<Matrix> diagA; // per node, reduced at node 0
  std::vector<Matrix> offA;  // coupling node i -> i+1
  std::vector<Matrix> diagM;

  /// Eigenvalue count of the pencil strictly below tau (Sturm sequence on
  /// the block LDL* factorization).
  int count_below_tau(double tau) const;
};

Discretization discretize(const HalfLineSystem& sys, double L, int N);

struct OracleOptions {
  double margin_factor = 10.0;
  double eig_tol = 1e-9;     // bisection tolerance for eigenvalue locations
  double lower_pad = 5.0;    // search padding below the spectral lower bound
};

struct OracleResult {
  int count = 0;                  // eigenvalues strictly below lambda0 - margin
  bool converged = false;         // N vs 2N counts agree
  bool ambiguous = false;         // an eigenvalue sits within margin of lambda0
  double margin = 0.0;
  std::vector<double> eigenvalues; // refined locations from the finer grid
  std::vector<std::string> flags;
  int count_coarse = -1;
  int count_fine = -1;
};

/// Counts generalized eigenvalues below lambda0 with a Richardson N vs 2N
/// agreement requirement and a margin band around lambda0.
OracleResult count_below(const HalfLineSystem& sys, double lambda0, double L, int N,
                         const OracleOptions& opts = {});

/// Slices the spectrum below lambda0 into isolated eigenvalues by bisection
/// on the Sturm count.
std::vector<double> eigenvalues_below(const Discretization& disc, double lambda0,
                                      double lower_bound, double eig_tol = 1e-9);

} // namespace maslov

#endif
