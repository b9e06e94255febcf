#include "maslov/symplectic.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>

namespace maslov {

Matrix symplectic_J(int n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -Matrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  return j;
}

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.jacobiSvd().singularValues()(0);
}

double hermitian_defect(const Matrix& a) { return operator_norm(Matrix(a - a.adjoint())); }

double wrap_angle(double theta) {
  double t = std::remainder(theta, 2.0 * M_PI);
  if (t <= -M_PI) t += 2.0 * M_PI;
  return t;
}

LagrangianFrame::LagrangianFrame(Matrix x, Matrix y) : X(std::move(x)), Y(std::move(y)) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols() || X.rows() != X.cols())
    throw Error("LagrangianFrame: blocks must be square and of equal size");
}

Matrix LagrangianFrame::stacked() const {
  Matrix s(2 * dim(), dim());
  s.topRows(dim()) = X;
  s.bottomRows(dim()) = Y;
  return s;
}

LagrangianFrame LagrangianFrame::from_stacked(const Matrix& s) {
  if (s.rows() != 2 * s.cols()) throw Error("from_stacked: expected 2n x n matrix");
  const int n = static_cast<int>(s.cols());
  return LagrangianFrame(s.topRows(n), s.bottomRows(n));
}

LagrangianFrame LagrangianFrame::dirichlet(int n) {
  return LagrangianFrame(Matrix::Zero(n, n), Matrix::Identity(n, n));
}

LagrangianFrame LagrangianFrame::neumann(int n) {
  return LagrangianFrame(Matrix::Identity(n, n), Matrix::Zero(n, n));
}

LagrangianFrame LagrangianFrame::orthonormalized() const {
  Eigen::HouseholderQR<Matrix> qr(stacked());
  Matrix q = qr.householderQ() * Matrix::Identity(2 * dim(), dim());
  return from_stacked(q);
}

double LagrangianFrame::symplectic_defect() const {
  const Matrix f = stacked();
  return operator_norm(Matrix(f.adjoint() * symplectic_J(dim()) * f));
}

Matrix LagrangianFrame::projector() const {
  const Matrix q = orthonormalized().stacked();
  return q * q.adjoint();
}

bool is_lagrangian(const LagrangianFrame& frame, double tol, double rank_rel_tol) {
  const Matrix f = frame.stacked();
  const auto sv = f.jacobiSvd().singularValues();
  if (sv(0) <= 0.0) return false;
  if (sv(sv.size() - 1) <= rank_rel_tol * sv(0)) return false;
  return frame.symplectic_defect() <= tol;
}

double grassmannian_distance(const LagrangianFrame& f1, const LagrangianFrame& f2) {
  if (f1.dim() != f2.dim()) throw Error("grassmannian_distance: dimension mismatch");
  for (const auto* f : {&f1, &f2}) {
    const auto sv = f->stacked().jacobiSvd().singularValues();
    if (sv(sv.size() - 1) <= 1e-12 * sv(0))
      throw NumericalError("grassmannian_distance: rank-deficient frame");
  }
  return operator_norm(Matrix(f1.projector() - f2.projector()));
}

namespace {

// (X + s*iY)(X - s*iY)^{-1} for an orthonormalized Lagrangian frame; the
// inverted factor is unitary up to the frame's Lagrangian defect.
Matrix cayley_factor(const LagrangianFrame& f, double s) {
  const Complex i(0.0, 1.0);
  const Matrix num = f.X + s * i * f.Y;
  const Matrix den = f.X - s * i * f.Y;
  Eigen::ColPivHouseholderQR<Matrix> qr(den);
  const double rcond = qr.matrixR().diagonal().cwiseAbs().minCoeff() /
                       std::max(qr.matrixR().diagonal().cwiseAbs().maxCoeff(), 1e-300);
  if (!qr.isInvertible() || rcond < 1e-10)
    throw NumericalError("pair_matrix: near-singular factor (input frame not Lagrangian?)");
  return num * qr.inverse();
}

} // namespace

PairMatrix pair_matrix(const LagrangianFrame& f1, const LagrangianFrame& f2) {
  if (f1.dim() != f2.dim()) throw Error("pair_matrix: dimension mismatch");
  const int n = f1.dim();
  const LagrangianFrame q1 = f1.orthonormalized();
  const LagrangianFrame q2 = f2.orthonormalized();
  PairMatrix out;
  out.W = -cayley_factor(q1, +1.0) * cayley_factor(q2, -1.0);
  out.unitarity_defect = operator_norm(Matrix(out.W.adjoint() * out.W - Matrix::Identity(n, n)));
  return out;
}

std::vector<double> unitary_eigenangles(const Matrix& W) {
  Eigen::ComplexSchur<Matrix> schur(W, /*computeU=*/false);
  std::vector<double> angles(static_cast<size_t>(W.rows()));
  for (int k = 0; k < W.rows(); ++k) angles[static_cast<size_t>(k)] = std::arg(schur.matrixT()(k, k));
  return angles;
}

int intersection_dimension(const LagrangianFrame& f1, const LagrangianFrame& f2,
                           double angle_tol) {
  const PairMatrix pm = pair_matrix(f1, f2);
  int count = 0;
  for (double th : unitary_eigenangles(pm.W))
    if (std::abs(wrap_angle(th - M_PI)) < angle_tol) ++count;
  return count;
}

} // namespace maslov
