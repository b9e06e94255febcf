#include "maslov/problem.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace maslov {

CoefficientModel CoefficientModel::constant(const Matrix& P0, const Matrix& V0,
                                            const Matrix& Q0) {
  CoefficientModel m;
  m.n = static_cast<int>(P0.rows());
  m.P = [P0](double) { return P0; };
  m.V = [V0](double) { return V0; };
  m.Q = [Q0](double) { return Q0; };
  m.Pprime = [n = m.n](double) { return Matrix::Zero(n, n); };
  m.P_plus = P0;
  m.V_plus = V0;
  m.Q_plus = Q0;
  m.eta = 1.0;
  Eigen::SelfAdjointEigenSolver<Matrix> ep(hermitize(P0));
  Eigen::SelfAdjointEigenSolver<Matrix> eq(hermitize(Q0));
  Eigen::SelfAdjointEigenSolver<Matrix> ev(hermitize(V0));
  m.theta_P = ep.eigenvalues().minCoeff();
  m.theta_Q = eq.eigenvalues().minCoeff();
  m.C_V = ev.eigenvalues().cwiseAbs().maxCoeff();
  return m;
}

Matrix BoundaryCondition::alpha() const {
  Matrix a(dim(), 2 * dim());
  a.leftCols(dim()) = alpha1;
  a.rightCols(dim()) = alpha2;
  return a;
}

Matrix BoundaryCondition::selfadjointness_defect() const {
  return alpha2 * alpha1.adjoint() - alpha1 * alpha2.adjoint();
}

BoundaryCondition BoundaryCondition::dirichlet(int n) {
  return {Matrix::Identity(n, n), Matrix::Zero(n, n)};
}

BoundaryCondition BoundaryCondition::neumann(int n) {
  return {Matrix::Zero(n, n), Matrix::Identity(n, n)};
}

namespace {

double min_eig(const Matrix& a) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(hermitize(a), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

double max_abs_eig(const Matrix& a) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(hermitize(a), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .cwiseAbs()
      .maxCoeff();
}

/// Orthogonal projector onto ker(A), via full SVD.
Matrix kernel_projector(const Matrix& a, double rel_tol = 1e-12) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = sv.size() > 0 ? sv(0) * rel_tol : 0.0;
  const int n = static_cast<int>(a.cols());
  Matrix proj = Matrix::Zero(n, n);
  for (int k = 0; k < sv.size(); ++k)
    if (sv(k) <= cut) proj += svd.matrixV().col(k) * svd.matrixV().col(k).adjoint();
  // columns of V beyond rank(A) (when A is wide or rank-deficient by shape)
  for (int k = static_cast<int>(sv.size()); k < n; ++k)
    proj += svd.matrixV().col(k) * svd.matrixV().col(k).adjoint();
  return proj;
}

} // namespace

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << (ok ? "valid" : "INVALID") << "; worst margins: P " << worst_positivity_P << ", Q "
     << worst_positivity_Q << ", V " << worst_bound_V << ", hermitian defect "
     << worst_hermitian << ", decay envelope " << decay_envelope;
  for (const auto& v : violations)
    os << "\n  violation: " << v.quantity << " at x=" << v.x << " margin=" << v.margin
       << (v.detail.empty() ? "" : " (" + v.detail + ")");
  return os.str();
}

ValidationReport validate_system(const CoefficientModel& model, const BoundaryCondition& bc,
                                 const std::vector<double>& sample_grid) {
  ValidationReport rep;
  if (sample_grid.empty()) throw Error("validate_system: empty sample grid");
  const int n = model.n;

  auto flag = [&rep](const std::string& q, double x, double margin, const std::string& d = "") {
    rep.ok = false;
    rep.violations.push_back({q, x, margin, d});
  };

  rep.worst_positivity_P = std::numeric_limits<double>::infinity();
  rep.worst_positivity_Q = std::numeric_limits<double>::infinity();
  rep.worst_bound_V = std::numeric_limits<double>::infinity();

  const double herm_tol = 1e-10;
  for (double x : sample_grid) {
    const Matrix p = model.P(x), v = model.V(x), q = model.Q(x);
    for (const auto& [name, a] : {std::pair<const char*, const Matrix*>{"P", &p},
                                  {"V", &v},
                                  {"Q", &q}}) {
      const double hd = hermitian_defect(*a);
      rep.worst_hermitian = std::max(rep.worst_hermitian, hd);
      if (hd > herm_tol * std::max(1.0, operator_norm(*a)))
        flag(std::string(name) + " hermitian", x, -hd);
    }
    const double mp = min_eig(p) - model.theta_P;
    const double mq = min_eig(q) - model.theta_Q;
    const double mv = model.C_V - max_abs_eig(v);
    rep.worst_positivity_P = std::min(rep.worst_positivity_P, mp);
    rep.worst_positivity_Q = std::min(rep.worst_positivity_Q, mq);
    rep.worst_bound_V = std::min(rep.worst_bound_V, mv);
    if (mp < -1e-12) flag("P positivity (theta_P)", x, mp);
    if (mq < -1e-12) flag("Q positivity (theta_Q)", x, mq);
    if (mv < -1e-12) flag("V bound (C_V)", x, mv);
  }

  // A2: exponential settling. The constant C is not declared, so anchor an
  // envelope on the first half of the grid and require the tail to stay
  // inside it (with a x10 slack).
  if (model.eta <= 0.0) flag("eta positivity", 0.0, -1.0);
  const double xmid = sample_grid[sample_grid.size() / 2];
  double c_anchor = 0.0, c_tail = 0.0;
  for (double x : sample_grid) {
    double dev = std::max({operator_norm(Matrix(model.P(x) - model.P_plus)),
                           operator_norm(Matrix(model.V(x) - model.V_plus)),
                           operator_norm(Matrix(model.Q(x) - model.Q_plus))});
    const double implied = dev * std::exp(model.eta * x);
    if (x <= xmid)
      c_anchor = std::max(c_anchor, implied);
    else
      c_tail = std::max(c_tail, implied);
  }
  rep.decay_envelope = std::max(c_anchor, c_tail);
  if (c_tail > 10.0 * std::max(c_anchor, 1e-8))
    flag("A2 decay envelope (eta too large?)", sample_grid.back(),
         10.0 * std::max(c_anchor, 1e-8) - c_tail);

  // A3
  if (bc.alpha1.rows() != n || bc.alpha2.rows() != n)
    flag("boundary dimensions", 0.0, -1.0);
  else {
    const double sd = operator_norm(bc.selfadjointness_defect());
    const double scale = std::max(1.0, operator_norm(bc.alpha()));
    if (sd > 1e-10 * scale) flag("alpha J alpha* = 0", 0.0, -sd);
    const auto sv = bc.alpha().jacobiSvd().singularValues();
    if (sv(sv.size() - 1) <= 1e-10 * sv(0)) flag("rank(alpha) = n", 0.0, -sv(sv.size() - 1));
  }

  return rep;
}

VertexProjectors vertex_projectors(const BoundaryCondition& bc) {
  const int n = bc.dim();
  VertexProjectors vp;
  vp.P_D = kernel_projector(bc.alpha2);
  vp.P_N = kernel_projector(bc.alpha1);
  vp.P_R = Matrix::Identity(n, n) - vp.P_D - vp.P_N;

  auto check_projection = [](const Matrix& p) {
    return operator_norm(Matrix(p * p - p)) < 1e-9 && hermitian_defect(p) < 1e-9;
  };
  if (operator_norm(Matrix(vp.P_D * vp.P_N)) > 1e-9 || !check_projection(vp.P_R))
    throw AssumptionError(
        "vertex_projectors: Dirichlet/Neumann kernels not orthogonal (A3 violated?)");

  // Robin rank and basis
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(vp.P_R));
  std::vector<int> robin_cols;
  for (int k = 0; k < n; ++k)
    if (es.eigenvalues()(k) > 0.5) robin_cols.push_back(k);
  vp.robin_rank = static_cast<int>(robin_cols.size());
  vp.Lambda = Matrix::Zero(n, n);
  vp.C_b = 0.0;
  if (vp.robin_rank == 0) return vp;

  Matrix B(n, vp.robin_rank);
  for (int k = 0; k < vp.robin_rank; ++k) B.col(k) = es.eigenvectors().col(robin_cols[k]);

  // Columns of J alpha* span the admissible (phi(0), P phi'(0)) pairs; on the
  // Robin block the condition is a graph w_R = Lambda u_R, recovered by least
  // squares from that span.
  const LagrangianFrame f = initial_frame(bc);
  const Matrix u_r = B.adjoint() * f.X; // r x n
  const Matrix w_r = B.adjoint() * f.Y;
  Eigen::ColPivHouseholderQR<Matrix> qr(u_r.adjoint()); // solve Lambda_r * u_r = w_r
  if (qr.rank() < vp.robin_rank)
    throw AssumptionError("vertex_projectors: Robin graph is degenerate beyond A3");
  Matrix lambda_r = qr.solve(w_r.adjoint()).adjoint();
  const double defect = hermitian_defect(lambda_r);
  lambda_r = hermitize(lambda_r);
  if (defect > 1e-8 * std::max(1.0, operator_norm(lambda_r)))
    throw AssumptionError("vertex_projectors: recovered Lambda is not Hermitian");
  vp.Lambda = B * lambda_r * B.adjoint();
  vp.C_b = operator_norm(lambda_r);
  return vp;
}

LagrangianFrame initial_frame(const BoundaryCondition& bc) {
  return LagrangianFrame(-bc.alpha2.adjoint(), bc.alpha1.adjoint());
}

Matrix hamiltonian_B(const CoefficientModel& model, double x, double lambda) {
  const int n = model.n;
  Matrix b = Matrix::Zero(2 * n, 2 * n);
  b.topLeftCorner(n, n) = lambda * model.Q(x) - model.V(x);
  b.bottomRightCorner(n, n) = model.P(x).inverse();
  return b;
}

Matrix hamiltonian_B_lambda(const CoefficientModel& model, double x) {
  const int n = model.n;
  Matrix b = Matrix::Zero(2 * n, 2 * n);
  b.topLeftCorner(n, n) = model.Q(x);
  return b;
}

Matrix hamiltonian_A(const CoefficientModel& model, double x, double lambda) {
  const int n = model.n;
  Matrix a = Matrix::Zero(2 * n, 2 * n);
  a.topRightCorner(n, n) = model.P(x).inverse();
  a.bottomLeftCorner(n, n) = model.V(x) - lambda * model.Q(x);
  return a;
}

} // namespace maslov
