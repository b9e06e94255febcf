#include "maslov/star_graph.hpp"

#include <cmath>

namespace maslov {

double StarGraphNLS::profile(double x) const {
  return std::pow(1.0 / std::cosh(p * x), 1.0 / p);
}

double StarGraphNLS::profile_d1(double x) const { return -profile(x) * std::tanh(p * x); }

double StarGraphNLS::profile_d2(double x) const {
  const double t = std::tanh(p * x);
  const double sech = 1.0 / std::cosh(p * x);
  return profile(x) * (t * t - p * sech * sech);
}

double StarGraphNLS::potential(double x) const {
  // s(x)^{2p} = sech^2(p x) for every p
  const double sech = 1.0 / std::cosh(p * x);
  const double s2p = sech * sech;
  if (op == Operator::Lplus) return 1.0 - (p + 1.0) * (2.0 * p + 1.0) * s2p;
  return 1.0 - (p + 1.0) * s2p;
}

BoundaryCondition neumann_kirchhoff(int n) {
  Matrix a1 = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    a1(i, i) = 1.0;
    a1(i, i + 1) = -1.0;
  }
  Matrix a2 = Matrix::Zero(n, n);
  a2.row(n - 1).setOnes();
  return {a1, a2};
}

HalfLineSystem build_system(const StarGraphNLS& cfg) {
  if (cfg.p <= 0.0 || cfg.n < 1) throw Error("star graph: need p > 0 and n >= 1");
  CoefficientModel m;
  const int n = cfg.n;
  m.n = n;
  m.P = [n](double) { return Matrix::Identity(n, n); };
  m.Q = [n](double) { return Matrix::Identity(n, n); };
  m.V = [cfg, n](double x) { return Matrix(cfg.potential(x) * Matrix::Identity(n, n)); };
  m.Pprime = [n](double) { return Matrix::Zero(n, n); };
  m.P_plus = Matrix::Identity(n, n);
  m.Q_plus = Matrix::Identity(n, n);
  m.V_plus = Matrix::Identity(n, n);
  m.eta = std::min(2.0 * cfg.p, 2.0); // sech^2(px) ~ 4 e^{-2px}, clamped
  m.theta_P = 1.0;
  m.theta_Q = 1.0;
  const double depth =
      cfg.op == StarGraphNLS::Operator::Lplus ? (cfg.p + 1.0) * (2.0 * cfg.p + 1.0)
                                              : (cfg.p + 1.0);
  m.C_V = std::max(std::abs(1.0 - depth), 1.0);
  return {m, neumann_kirchhoff(n)};
}

Complex analytic_q(const StarGraphNLS& cfg, double x) {
  if (x == 0.0) return Complex(-1.0, 0.0); // limit with s'(0) = 0, s''(0) = -p
  const Complex i(0.0, 1.0);
  const double d1 = cfg.profile_d1(x);
  const double d2 = cfg.profile_d2(x);
  return (d1 - i * d2) / (d1 + i * d2);
}

std::vector<Complex> analytic_top_shelf(const StarGraphNLS& cfg, double lambda) {
  if (!(lambda < 1.0)) throw NumericalError("analytic_top_shelf: requires lambda < 1");
  const Complex i(0.0, 1.0);
  const double root = std::sqrt(1.0 - lambda);
  const Complex w = (1.0 + i * root) / (1.0 - i * root);
  std::vector<Complex> eigs(static_cast<size_t>(cfg.n), w);
  eigs.back() = -w;
  return eigs;
}

} // namespace maslov
