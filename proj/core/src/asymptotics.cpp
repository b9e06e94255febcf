#include "maslov/asymptotics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

namespace maslov {

Matrix AsymptoticData::D() const {
  Matrix d = Matrix::Zero(mu.size(), mu.size());
  for (int k = 0; k < mu.size(); ++k) d(k, k) = mu(k);
  return d;
}

EssentialSpectrumEdge essential_edge(const Matrix& P_plus, const Matrix& V_plus,
                                     const Matrix& Q_plus) {
  if (hermitian_defect(V_plus) > 1e-10 * std::max(1.0, operator_norm(V_plus)) ||
      hermitian_defect(Q_plus) > 1e-10 * std::max(1.0, operator_norm(Q_plus)) ||
      hermitian_defect(P_plus) > 1e-10 * std::max(1.0, operator_norm(P_plus)))
    throw AssumptionError("essential_edge: endstates must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> qchk(hermitize(Q_plus), Eigen::EigenvaluesOnly);
  if (qchk.eigenvalues().minCoeff() <= 0.0)
    throw AssumptionError("essential_edge: Q+ must be positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(hermitize(V_plus), hermitize(Q_plus),
                                                       Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  return {ges.eigenvalues().minCoeff()};
}

namespace {

// P+-inner-product Gram-Schmidt of the columns of A; returns the
// orthonormalized matrix (columns with tiny P+-norm are dropped).
Matrix gram_schmidt_pplus(const Matrix& a, const Matrix& p_plus) {
  Matrix out(a.rows(), a.cols());
  int kept = 0;
  for (int c = 0; c < a.cols(); ++c) {
    Vector v = a.col(c);
    for (int k = 0; k < kept; ++k) {
      const Complex proj = (out.col(k).adjoint() * p_plus * v)(0, 0);
      v -= proj * out.col(k);
    }
    const double nrm = std::sqrt(std::real((v.adjoint() * p_plus * v)(0, 0)));
    if (nrm > 1e-10) out.col(kept++) = v / nrm;
  }
  return out.leftCols(kept);
}

} // namespace

AsymptoticData asymptotic_data(const CoefficientModel& model, double lambda) {
  const int n = model.n;
  const double kappa = essential_edge(model.P_plus, model.V_plus, model.Q_plus).kappa;
  if (!(lambda < kappa))
    throw NumericalError("asymptotic_data: lambda >= kappa (no exponential dichotomy)");

  // P+^{-1}(V+ - lambda Q+) r = nu r with nu = mu^2 > 0, as the Hermitian
  // pencil (V+ - lambda Q+) r = nu P+ r; eigenvectors come out P+-orthonormal.
  const Matrix vq = hermitize(Matrix(model.V_plus - lambda * model.Q_plus));
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(vq, hermitize(model.P_plus),
                                                       Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  RealVector nu = ges.eigenvalues();
  Matrix vecs = ges.eigenvectors();
  if (nu.minCoeff() <= 0.0)
    throw NumericalError("asymptotic_data: non-positive mu^2 despite lambda < kappa");

  // mu = -sqrt(nu), sorted ascending in mu  <=>  nu descending.
  AsymptoticData out;
  out.lambda = lambda;
  out.mu.resize(n);
  out.R.resize(n, n);
  std::vector<int> order(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) order[static_cast<size_t>(k)] = k;
  std::sort(order.begin(), order.end(), [&nu](int a, int b) { return nu(a) > nu(b); });
  for (int k = 0; k < n; ++k) {
    out.mu(k) = -std::sqrt(nu(order[static_cast<size_t>(k)]));
    out.R.col(k) = vecs.col(order[static_cast<size_t>(k)]);
  }

  // Gauge-fix degenerate clusters against the canonical basis so the columns
  // vary continuously when lambda sweeps through ordering exchanges.
  int c0 = 0;
  while (c0 < n) {
    int c1 = c0 + 1;
    while (c1 < n && std::abs(out.mu(c1) - out.mu(c0)) <=
                         1e-9 * std::max(1.0, std::abs(out.mu(c0))))
      ++c1;
    const int width = c1 - c0;
    if (width > 1) {
      const Matrix basis = out.R.middleCols(c0, width);
      const Matrix proj = basis * (basis.adjoint() * model.P_plus); // P+-orthogonal projector
      Matrix candidates(n, n);
      for (int k = 0; k < n; ++k) candidates.col(k) = proj * Matrix::Identity(n, n).col(k);
      const Matrix fixed = gram_schmidt_pplus(candidates, model.P_plus);
      if (fixed.cols() == width) out.R.middleCols(c0, width) = fixed;
    }
    c0 = c1;
  }

  const Matrix d = out.D();
  out.frame_decay = LagrangianFrame(out.R, model.P_plus * out.R * d);
  out.frame_grow = LagrangianFrame(out.R, -model.P_plus * out.R * d);

  out.A_plus = Matrix::Zero(2 * n, 2 * n);
  out.A_plus.topRightCorner(n, n) = model.P_plus.inverse();
  out.A_plus.bottomLeftCorner(n, n) = model.V_plus - lambda * model.Q_plus;
  return out;
}

double lambda_infinity_bound(const CoefficientModel& model, const VertexProjectors& vp) {
  const double base = model.C_V / model.theta_Q;
  double bound = base;
  if (vp.C_b > 0.0) {
    const double eps = model.theta_P / vp.C_b;
    const double one_sided = base + vp.C_b / (eps * model.theta_Q);
    const double scaled = base + 2.0 * vp.C_b * vp.C_b / (model.theta_P * model.theta_Q);
    bound = std::max(one_sided, scaled);
  }
  return bound * 1.1 + 1.0;
}

} // namespace maslov
