#include "maslov/hormander.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace maslov {

namespace {

double smallest_sv_ratio(const Matrix& a) {
  const auto sv = a.jacobiSvd().singularValues();
  return sv(sv.size() - 1) / std::max(sv(0), 1e-300);
}

int eig_signature(const Matrix& hermitian, double zero_rel_tol, int* zero_count) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  int pos = 0, neg = 0, zero = 0;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    const double ev = es.eigenvalues()(k);
    if (ev > zero_rel_tol * scale)
      ++pos;
    else if (ev < -zero_rel_tol * scale)
      ++neg;
    else
      ++zero;
  }
  if (zero_count) *zero_count = zero;
  return pos - neg;
}

} // namespace

Matrix c12_matrix(const LagrangianFrame& ell_G, const LagrangianFrame& ell_0,
                  double* hermitize_defect_out, C12Formula formula) {
  const int n = ell_G.dim();
  if (intersection_dimension(ell_0, LagrangianFrame::dirichlet(n)) > 0)
    throw AssumptionError("c12_matrix: l0 intersects the Dirichlet plane");
  if (intersection_dimension(ell_0, ell_G) > 0)
    throw AssumptionError("c12_matrix: l0 intersects l_G");

  const LagrangianFrame g = ell_G.orthonormalized();
  const LagrangianFrame f0 = ell_0.orthonormalized();
  const double cond_threshold = 1e-6;
  const bool xg_ok = smallest_sv_ratio(g.X) > cond_threshold;
  const bool x0_ok = smallest_sv_ratio(f0.X) > cond_threshold;

  if (formula == C12Formula::automatic)
    formula = (xg_ok && x0_ok) ? C12Formula::both_inverse
                               : xg_ok ? C12Formula::single_inverse : C12Formula::cayley;
  if ((formula == C12Formula::both_inverse && !(xg_ok && x0_ok)) ||
      (formula == C12Formula::single_inverse && !xg_ok))
    throw NumericalError("c12_matrix: requested formula needs an invertible X block");

  Matrix c12;
  if (formula == C12Formula::both_inverse) {
    const Matrix yg_xg = g.Y * g.X.inverse();
    const Matrix y0_x0 = f0.Y * f0.X.inverse();
    c12 = Matrix(y0_x0 - yg_xg).inverse();
  } else if (formula == C12Formula::single_inverse) {
    const Matrix yg_xg = g.Y * g.X.inverse();
    c12 = f0.X * Matrix(f0.Y - yg_xg * f0.X).inverse();
  } else {
    const Complex i(0.0, 1.0);
    const Matrix w0 = (f0.X - i * f0.Y) * Matrix(f0.X + i * f0.Y).inverse();
    const Matrix wg = (g.X - i * g.Y) * Matrix(g.X + i * g.Y).inverse();
    c12 = -i * f0.X * Matrix(g.X + i * g.Y).inverse() * Matrix(w0 - wg).inverse() *
          (w0 + Matrix::Identity(n, n));
  }

  const double defect = hermitian_defect(c12);
  if (hermitize_defect_out) *hermitize_defect_out = defect;
  if (defect > 1e-6 * std::max(1.0, operator_norm(c12))) {
    std::ostringstream os;
    os << "c12_matrix: Hermitization defect " << defect
       << " exceeds tolerance (preconditions violated?)";
    throw NumericalError(os.str());
  }
  return hermitize(c12);
}

Matrix unitary_symplectic_for(const LagrangianFrame& frame) {
  const int n = frame.dim();
  const Matrix f = frame.orthonormalized().stacked();
  Matrix u(2 * n, 2 * n);
  u.leftCols(n) = f;
  u.rightCols(n) = symplectic_J(n) * f;
  return u;
}

QForm q_form(const LagrangianFrame& l1, const LagrangianFrame& l2, const LagrangianFrame& l0,
             double zero_rel_tol) {
  const int n = l1.dim();
  // S = J U* is unitary symplectic and maps l1 to the Dirichlet plane; the
  // form values are invariant under such transport.
  const Matrix u = unitary_symplectic_for(l1);
  const Matrix s = symplectic_J(n) * u.adjoint();
  const auto moved = [&](const LagrangianFrame& f) {
    return LagrangianFrame::from_stacked(Matrix(s * f.stacked()));
  };
  QForm q;
  q.matrix = c12_matrix(moved(l2), moved(l0), &q.hermitize_defect);
  q.signature = eig_signature(q.matrix, zero_rel_tol, &q.zero_count);
  if (q.zero_count > 0)
    throw DegenerateSignatureError("q_form: eigenvalue inside the zero threshold");
  return q;
}

HormanderIndex hormander_index(const LagrangianFrame& l1, const LagrangianFrame& l2,
                               const LagrangianFrame& lstart, const LagrangianFrame& lend) {
  if (intersection_dimension(l1, l2) > 0)
    throw AssumptionError("hormander_index: l1 and l2 intersect");
  const QForm qa = q_form(l1, l2, lstart);
  const QForm qb = q_form(l1, l2, lend);
  HormanderIndex out;
  out.twice = qa.signature - qb.signature;
  out.value = 0.5 * static_cast<double>(out.twice);
  return out;
}

double hormander_index_via_paths(const LagrangianFrame& l1, const LagrangianFrame& l2,
                                 const FrameFn& path, double t0, double t1,
                                 const TrackOptions& opts) {
  const auto mas2 = maslov_flow([l2](double) { return l2; }, path, t0, t1, opts);
  const auto mas1 = maslov_flow([l1](double) { return l1; }, path, t0, t1, opts);
  return static_cast<double>(mas2.maslov_index - mas1.maslov_index);
}

double dirichlet_exchange_correction(const BoundaryCondition& bc, const AsymptoticData& asym) {
  const int n = bc.dim();
  Eigen::ColPivHouseholderQR<Matrix> qr(bc.alpha2.adjoint());
  if (!qr.isInvertible())
    throw AssumptionError("dirichlet_exchange_correction: alpha2 is singular");
  const Matrix a1a2 = -bc.alpha1.adjoint() * qr.inverse();
  const Matrix rdr =
      asym.frame_decay.Y * asym.R.inverse(); // P+ R D R* P+, via Y = P+ R D and R* P+ = R^{-1}
  Matrix m = hermitize(Matrix(a1a2 - rdr));
  int zero = 0;
  const int sig = eig_signature(m, 1e-8, &zero);
  if (zero > 0)
    throw DegenerateSignatureError(
        "dirichlet_exchange_correction: degenerate signature (eigenvalue at zero)");
  return 0.5 * (-static_cast<double>(n) + static_cast<double>(sig));
}

} // namespace maslov
