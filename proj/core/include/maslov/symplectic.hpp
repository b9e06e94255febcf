#ifndef MASLOV_SYMPLECTIC_HPP
#define MASLOV_SYMPLECTIC_HPP

#include "maslov/types.hpp"

#include <vector>

namespace maslov {

/// Frame (X; Y) for an n-plane of C^{2n}. Columns of the stacked 2n x n
/// matrix span the plane; the plane is Lagrangian when the stacked matrix
/// has rank n and annihilates the symplectic form.
struct LagrangianFrame {
  Matrix X; // top n x n block
  Matrix Y; // bottom n x n block

  LagrangianFrame() = default;
  LagrangianFrame(Matrix x, Matrix y);

  int dim() const { return static_cast<int>(X.rows()); }
  Matrix stacked() const;

  static LagrangianFrame from_stacked(const Matrix& s);
  /// (0; I): the Dirichlet plane.
  static LagrangianFrame dirichlet(int n);
  /// (I; 0): the Neumann plane.
  static LagrangianFrame neumann(int n);

  /// Same subspace, orthonormal columns (thin QR).
  LagrangianFrame orthonormalized() const;

  /// ||F* J F||.
  double symplectic_defect() const;

  /// Orthogonal projector onto the column span.
  Matrix projector() const;
};

struct PairMatrix {
  Matrix W;                // n x n, unitary up to defect
  double unitarity_defect; // ||W* W - I||
};

/// rank(F) = n (relative singular-value threshold) and ||F* J F|| <= tol.
bool is_lagrangian(const LagrangianFrame& frame, double tol = 1e-8,
                   double rank_rel_tol = 1e-10);

/// ||P1 - P2|| in operator norm; frame-choice independent.
double grassmannian_distance(const LagrangianFrame& f1, const LagrangianFrame& f2);

/// W = -(X1 + iY1)(X1 - iY1)^{-1} (X2 - iY2)(X2 + iY2)^{-1}.
/// Frames are orthonormalized first, which makes every factor unitary for
/// genuinely Lagrangian inputs; a near-singular factor means the input was
/// not a Lagrangian frame and raises NumericalError.
PairMatrix pair_matrix(const LagrangianFrame& f1, const LagrangianFrame& f2);

/// Eigenvalue angles of a (numerically) unitary matrix, each in (-pi, pi].
std::vector<double> unitary_eigenangles(const Matrix& W);

/// dim(l1 ∩ l2) = number of eigenvalues of the pair matrix within angular
/// distance angle_tol of -1.
int intersection_dimension(const LagrangianFrame& f1, const LagrangianFrame& f2,
                           double angle_tol = 1e-6);

} // namespace maslov

#endif
