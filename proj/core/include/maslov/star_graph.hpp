#ifndef MASLOV_STAR_GRAPH_HPP
#define MASLOV_STAR_GRAPH_HPP

#include "maslov/problem.hpp"

#include <vector>

namespace maslov {

/// Linearization of NLS on an n-edge star graph about the half-soliton
/// profile s(x) = sech^{1/p}(p x), with Neumann-Kirchhoff vertex coupling.
struct StarGraphNLS {
  enum class Operator { Lplus, Lminus };
  int n = 3;
  double p = 1.0;
  Operator op = Operator::Lplus;

  double profile(double x) const;        // s(x)
  double profile_d1(double x) const;     // s'(x) = -s tanh(px)
  double profile_d2(double x) const;     // s'' = s tanh^2(px) - s p sech^2(px)
  double potential(double x) const;      // the scalar potential of the selected operator
};

/// Neumann-Kirchhoff vertex matrices: continuity differences and the
/// derivative-sum row.
BoundaryCondition neumann_kirchhoff(int n);

HalfLineSystem build_system(const StarGraphNLS& cfg);

/// q(x) = (s' - i s'')(s' + i s'')^{-1}; q(0) = -1 by the limit s'(0) = 0,
/// s''(0) = -p.
Complex analytic_q(const StarGraphNLS& cfg, double x);

/// Eigenvalues of the asymptotic pair matrix on the lambda shelf:
/// (1 + i sqrt(1-lambda))/(1 - i sqrt(1-lambda)) with multiplicity n-1 and
/// its negative once. Requires lambda < 1.
std::vector<Complex> analytic_top_shelf(const StarGraphNLS& cfg, double lambda);

} // namespace maslov

#endif
