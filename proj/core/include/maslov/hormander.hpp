#ifndef MASLOV_HORMANDER_HPP
#define MASLOV_HORMANDER_HPP

#include "maslov/asymptotics.hpp"
#include "maslov/spectral_flow.hpp"
#include "maslov/symplectic.hpp"

namespace maslov {

/// Hermitian representative of the form (J C u, v) on l1 for the graph map
/// C: l1 -> l2 whose graph over l1 is l0, together with its signature.
struct QForm {
  Matrix matrix;      // Hermitian n x n representative
  int signature = 0;  // (#positive) - (#negative) above the zero threshold
  int zero_count = 0;
  double hermitize_defect = 0.0;
};

struct HormanderIndex {
  double value = 0.0; // integer or half-integer
  int twice = 0;      // 2 * value, exact
};

enum class C12Formula { automatic, both_inverse, single_inverse, cayley };

/// C12 block of the graph map of l0 over (l_D, l_G). By default picks
/// between the two-inverse, one-inverse and Cayley-product formulas by
/// conditioning of the X blocks; Hermitizes and records the asymmetry
/// defect. The three formulas produce the same matrix wherever they apply.
Matrix c12_matrix(const LagrangianFrame& ell_G, const LagrangianFrame& ell_0,
                  double* hermitize_defect = nullptr,
                  C12Formula formula = C12Formula::automatic);

/// Q-form of (l1, l2; l0) for arbitrary Lagrangian l1, computed by rotating
/// l1 to the Dirichlet plane with a unitary symplectic map.
QForm q_form(const LagrangianFrame& l1, const LagrangianFrame& l2, const LagrangianFrame& l0,
             double zero_rel_tol = 1e-8);

/// 1/2 (sgn Q(l1, l2; lstart) - sgn Q(l1, l2; lend)). Preconditions: l1 and
/// l2 transverse; lstart, lend each transverse to both.
HormanderIndex hormander_index(const LagrangianFrame& l1, const LagrangianFrame& l2,
                               const LagrangianFrame& lstart, const LagrangianFrame& lend);

/// The defining difference of Maslov indices along an explicit connecting
/// path: Mas(path, l2) - Mas(path, l1).
double hormander_index_via_paths(const LagrangianFrame& l1, const LagrangianFrame& l2,
                                 const FrameFn& path, double t0, double t1,
                                 const TrackOptions& opts = {});

/// 1/2 (-n + sgn(-alpha1* (alpha2*)^{-1} - P+ R D R* P+)), the exchange term
/// that appears when the asymptotic target is replaced by the Dirichlet
/// plane. Requires alpha2 invertible; a zero eigenvalue inside the threshold
/// raises DegenerateSignatureError.
double dirichlet_exchange_correction(const BoundaryCondition& bc, const AsymptoticData& asym);

/// Unitary symplectic matrix U with U * span(e_1..e_n) = span(frame); its
/// first n columns are an orthonormal frame for the plane.
Matrix unitary_symplectic_for(const LagrangianFrame& frame);

} // namespace maslov

#endif
