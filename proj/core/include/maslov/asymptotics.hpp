#ifndef MASLOV_ASYMPTOTICS_HPP
#define MASLOV_ASYMPTOTICS_HPP

#include "maslov/problem.hpp"

namespace maslov {

struct EssentialSpectrumEdge {
  double kappa = 0.0;
};

/// Spectral data of the limiting constant-coefficient problem at a fixed
/// lambda < kappa: decaying exponents mu_k < 0 (ascending), P+-orthonormal
/// eigenvector matrix R, and the asymptotic decaying/growing frames
/// (R; P+ R D) and (R; -P+ R D).
struct AsymptoticData {
  double lambda = 0.0;
  RealVector mu;   // ascending, all negative
  Matrix R;        // columns P+-orthonormal: R* P+ R = I
  Matrix A_plus;   // limiting 2n x 2n first-order coefficient
  LagrangianFrame frame_decay;
  LagrangianFrame frame_grow;

  Matrix D() const; // diag(mu)
};

/// kappa = smallest eigenvalue of the Hermitian pencil (V+, Q+).
EssentialSpectrumEdge essential_edge(const Matrix& P_plus, const Matrix& V_plus,
                                     const Matrix& Q_plus);

/// Solves P+^{-1}(V+ - lambda Q+) r = mu^2 r. Throws NumericalError for
/// lambda >= kappa. Degenerate mu clusters are gauge-fixed against the
/// canonical basis so R(lambda) is continuous along lambda sweeps.
AsymptoticData asymptotic_data(const CoefficientModel& model, double lambda);

/// Left-shelf exclusion bound: no eigenvalues of any vertex-shifted problem
/// below -lambda_inf. Returned value includes the safety margin (x1.1, +1).
double lambda_infinity_bound(const CoefficientModel& model, const VertexProjectors& vp);

} // namespace maslov

#endif
