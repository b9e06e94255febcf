#include "maslov/fd_oracle.hpp"

#include "maslov/asymptotics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace maslov {

namespace {

int negative_count(const Matrix& hermitian, bool* singular, double singular_tol = 1e-11) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  int neg = 0;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    if (es.eigenvalues()(k) < 0.0) ++neg;
    if (std::abs(es.eigenvalues()(k)) < singular_tol * scale) *singular = true;
  }
  return neg;
}

} // namespace

Discretization discretize(const HalfLineSystem& sys, double L, int N) {
  if (N < 2) throw Error("discretize: N too small");
  const auto& model = sys.model;
  const int n = model.n;
  Discretization d;
  d.L = L;
  d.N = N;
  d.h = L / static_cast<double>(N);
  d.n = n;

  const VertexProjectors vp = vertex_projectors(sys.bc);

  // admissible vertex values: orthogonal complement of the Dirichlet range
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(vp.P_D));
  std::vector<int> keep;
  for (int k = 0; k < n; ++k)
    if (es.eigenvalues()(k) < 0.5) keep.push_back(k);
  d.node0_dim = static_cast<int>(keep.size());
  d.basis0 = Matrix(n, d.node0_dim);
  for (int k = 0; k < d.node0_dim; ++k) d.basis0.col(k) = es.eigenvectors().col(keep[k]);

  const double h = d.h;
  auto pmid = [&](int cell) { return model.P((cell + 0.5) * h); };
  const Matrix lambda_r = vp.P_R * vp.Lambda * vp.P_R;

  // energy assembly: sum_cells (P_mid d, d)/h + h sum w_i (V_i u, u)
  //                  + (Lambda_R u_0, u_0), Dirichlet at node N
  d.diagA.resize(static_cast<size_t>(N));
  d.offA.resize(static_cast<size_t>(N > 0 ? N - 1 : 0));
  d.diagM.resize(static_cast<size_t>(N));
  for (int i = 0; i < N; ++i) {
    Matrix diag;
    if (i == 0) {
      diag = pmid(0) / h + 0.5 * h * model.V(0.0) + lambda_r;
      d.diagA[0] = d.basis0.adjoint() * diag * d.basis0;
      d.diagM[0] = d.basis0.adjoint() * Matrix(0.5 * h * model.Q(0.0)) * d.basis0;
    } else {
      diag = (pmid(i - 1) + pmid(i)) / h + h * model.V(i * h);
      d.diagA[static_cast<size_t>(i)] = hermitize(diag);
      d.diagM[static_cast<size_t>(i)] = hermitize(Matrix(h * model.Q(i * h)));
    }
    if (i + 1 < N) {
      const Matrix off = -pmid(i) / h;
      d.offA[static_cast<size_t>(i)] = (i == 0) ? Matrix(d.basis0.adjoint() * off) : off;
    }
  }
  d.diagA[0] = hermitize(d.diagA[0]);
  d.diagM[0] = hermitize(d.diagM[0]);
  return d;
}

int Discretization::count_below_tau(double tau) const {
  double jitter = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    bool singular = false;
    int neg = 0;
    Matrix schur;
    bool have_prev = false;
    size_t off_prev = 0;
    for (size_t i = 0; i < diagA.size(); ++i) {
      if (diagA[i].rows() == 0) continue; // fully Dirichlet vertex
      Matrix s = diagA[i] - (tau + jitter) * diagM[i];
      if (have_prev) {
        const Matrix& c = offA[off_prev]; // couples previous kept node to i
        s -= c.adjoint() * schur.inverse() * c;
      }
      neg += negative_count(s, &singular);
      if (singular) break;
      schur = s;
      have_prev = true;
      off_prev = i;
    }
    if (!singular) return neg;
    jitter = (jitter == 0.0 ? 1e-10 : jitter * 16.0) * std::max(1.0, std::abs(tau));
  }
  throw NumericalError("count_below_tau: persistent singular pivot");
}

std::vector<double> eigenvalues_below(const Discretization& disc, double lambda0,
                                      double lower_bound, double eig_tol) {
  std::vector<double> out;
  double lo = lower_bound;
  int tries = 0;
  while (disc.count_below_tau(lo) > 0 && tries++ < 60) lo -= std::max(1.0, std::abs(lo));
  const int total = disc.count_below_tau(lambda0);
  for (int j = 1; j <= total; ++j) {
    double a = lo, b = lambda0;
    while (b - a > eig_tol * std::max(1.0, std::abs(a) + std::abs(b))) {
      const double m = 0.5 * (a + b);
      if (disc.count_below_tau(m) >= j)
        b = m;
      else
        a = m;
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

OracleResult count_below(const HalfLineSystem& sys, double lambda0, double L, int N,
                         const OracleOptions& opts) {
  OracleResult res;
  const Discretization coarse = discretize(sys, L, N);
  const Discretization fine = discretize(sys, L, 2 * N);

  const VertexProjectors vp = vertex_projectors(sys.bc);
  const double lb = -lambda_infinity_bound(sys.model, vp) - opts.lower_pad;

  const auto ev_coarse = eigenvalues_below(coarse, lambda0, lb, opts.eig_tol);
  const auto ev_fine = eigenvalues_below(fine, lambda0, lb, opts.eig_tol);

  // margin from the observed Richardson differences
  double delta = 0.0;
  for (size_t k = 0; k < std::min(ev_coarse.size(), ev_fine.size()); ++k)
    delta = std::max(delta, std::abs(ev_coarse[k] - ev_fine[k]));
  const double hh = L / static_cast<double>(N);
  res.margin = std::max(opts.margin_factor * delta, hh * hh);

  res.count_coarse = static_cast<int>(ev_coarse.size());
  res.count_fine = static_cast<int>(ev_fine.size());
  res.eigenvalues = ev_fine;

  auto count_at = [&fine](double tau) { return fine.count_below_tau(tau); };
  res.count = count_at(lambda0 - res.margin);
  res.ambiguous = count_at(lambda0 + res.margin) != res.count;
  if (res.ambiguous) res.flags.push_back("eigenvalue within margin of lambda0");

  res.converged = res.count_coarse == res.count_fine;
  if (!res.converged) {
    std::ostringstream os;
    os << "unconverged count: N=" << N << " gives " << res.count_coarse << ", 2N gives "
       << res.count_fine;
    res.flags.push_back(os.str());
  }
  // drop any eigenvalue inside the margin band from the "below" list
  while (!res.eigenvalues.empty() && res.eigenvalues.back() > lambda0 - res.margin)
    res.eigenvalues.pop_back();
  return res;
}

} // namespace maslov
