#include "maslov/morse.hpp"
#include "maslov/fd_oracle.hpp"
#include "maslov/star_graph.hpp"

#include <doctest.h>

#include <cmath>

using namespace maslov;

namespace {

HalfLineSystem sech_scalar(double c, BoundaryCondition bc) {
  CoefficientModel m;
  m.n = 1;
  m.P = [](double) { return Matrix::Identity(1, 1); };
  m.Q = [](double) { return Matrix::Identity(1, 1); };
  m.V = [c](double x) {
    const double sech = 1.0 / std::cosh(x);
    return Matrix((1.0 - c * sech * sech) * Matrix::Identity(1, 1));
  };
  m.P_plus = Matrix::Identity(1, 1);
  m.Q_plus = Matrix::Identity(1, 1);
  m.V_plus = Matrix::Identity(1, 1);
  m.eta = 2.0;
  m.theta_P = m.theta_Q = 1.0;
  m.C_V = std::max(1.0, std::abs(1.0 - c));
  return {m, std::move(bc)};
}

} // namespace

TEST_CASE("boundary inconjugacy") {
  StarGraphNLS cfg;
  cfg.n = 3;
  const HalfLineSystem star = build_system(cfg);
  for (double li : {0.5, 3.0, 20.0}) CHECK(check_boundary_inconjugate(star, li));

  // Dirichlet boundary plane is transverse to the decaying plane whenever R
  // is invertible
  HalfLineSystem dir = sech_scalar(6.0, BoundaryCondition::dirichlet(1));
  CHECK(check_boundary_inconjugate(dir, 2.0));

  CHECK_THROWS_AS(check_boundary_inconjugate(dir, -1.0), Error);
}

TEST_CASE("constructed coincidence needs few bumps") {
  // tune the boundary plane to hit the decaying plane at lambda = -4 exactly
  CoefficientModel m = CoefficientModel::constant(
      Matrix::Identity(1, 1), Matrix(5.0 * Matrix::Identity(1, 1)), Matrix::Identity(1, 1));
  const AsymptoticData hit = asymptotic_data(m, -4.0);
  const LagrangianFrame plane = hit.frame_decay;
  BoundaryCondition bc{plane.Y.adjoint(), Matrix(-plane.X.adjoint())};
  const HalfLineSystem sys{m, bc};

  CHECK_FALSE(check_boundary_inconjugate(sys, 4.0));
  int bumps = 0;
  double li = 4.0;
  while (!check_boundary_inconjugate(sys, li)) {
    li = li * 1.25 + 0.5;
    ++bumps;
    REQUIRE(bumps < 10);
  }
  CHECK(bumps <= 3);
}

TEST_CASE("scalar sech well, all methods agree with the oracle") {
  // Neumann vertex: one eigenvalue (-3) below 0
  const HalfLineSystem sys = sech_scalar(6.0, BoundaryCondition::neumann(1));

  const MorseReport t0 = morse_via_target0(sys, 0.0);
  CHECK(t0.morse_index == 1);
  CHECK(t0.box.loop_sum() == 0);
  CHECK(t0.box.left.maslov_index == 0);
  CHECK(t0.max_lagrangian_defect <= 1e-8);
  CHECK(t0.max_unitarity_defect <= 1e-8);

  const MorseReport tp = morse_via_targetplus(sys, 0.0);
  CHECK(tp.morse_index == 1);
  CHECK(tp.box.loop_sum() == 0);

  // remark identity: Mas(l1(0), l2(.)) = -Mas(l1(.), l2+)
  CHECK(t0.box.right.maslov_index == -tp.box.right.maslov_index);

  // the corollary needs l1(0) transverse to the Dirichlet plane: Neumann ok
  const MorseReport co = morse_via_corollary(sys, 0.0);
  CHECK(co.morse_index == 1);
  CHECK(co.correction == doctest::Approx(0.0));

  const OracleResult oracle = count_below(sys, 0.0, 30.0, 2000);
  CHECK(oracle.count == 1);

  // bottom-shelf conjugate point sits at the eigenvalue
  REQUIRE(!t0.box.bottom.conjugate_points.empty());
  const auto& cp = t0.box.bottom.conjugate_points.front();
  CHECK(std::abs(0.5 * (cp.t + cp.t_end) - oracle.eigenvalues.at(0)) < 1e-2);
}

TEST_CASE("positive operator counts zero") {
  CoefficientModel m = CoefficientModel::constant(
      Matrix::Identity(2, 2), Matrix(0.5 * Matrix::Identity(2, 2)), Matrix::Identity(2, 2));
  const HalfLineSystem sys{m, BoundaryCondition::dirichlet(2)};

  const MorseReport t0 = morse_via_target0(sys, 0.0);
  CHECK(t0.morse_index == 0);
  const MorseReport tp = morse_via_targetplus(sys, 0.0);
  CHECK(tp.morse_index == 0);
  CHECK(t0.box.loop_sum() == 0);
  CHECK(tp.box.loop_sum() == 0);

  // Dirichlet vertex violates the corollary preconditions
  CHECK_THROWS_AS(morse_via_corollary(sys, 0.0), AssumptionError);
}

TEST_CASE("deeper well, two bound states") {
  // c = 20: the 1 - 20 sech^2 ladder sits at -15, -8, -3, 0; the Neumann
  // vertex keeps the even pair {-15, -3}
  const HalfLineSystem sys = sech_scalar(20.0, BoundaryCondition::neumann(1));
  const MorseReport t0 = morse_via_target0(sys, 0.0);
  const OracleResult oracle = count_below(sys, 0.0, 35.0, 3000);
  CHECK(oracle.count == 2);
  CHECK(t0.morse_index == oracle.count);
  CHECK(t0.box.loop_sum() == 0);

  const MorseReport tp = morse_via_targetplus(sys, 0.0);
  CHECK(tp.morse_index == oracle.count);
  CHECK(t0.box.right.maslov_index == -tp.box.right.maslov_index);

  // locations match within the discretization budget
  std::vector<double> maslov_lams;
  for (const auto& cp : t0.box.bottom.conjugate_points)
    if (cp.kind == ConjugatePoint::Kind::interior)
      for (int q = 0; q < cp.multiplicity; ++q)
        maslov_lams.push_back(0.5 * (cp.t + cp.t_end));
  REQUIRE(maslov_lams.size() == oracle.eigenvalues.size());
  for (size_t k = 0; k < maslov_lams.size(); ++k)
    CHECK(std::abs(maslov_lams[k] - oracle.eigenvalues[k]) < 1e-2);
}

TEST_CASE("lambda0 near an eigenvalue is flagged") {
  const HalfLineSystem sys = sech_scalar(6.0, BoundaryCondition::neumann(1));
  // the eigenvalue sits at -3; probing lambda0 right there must warn
  const MorseReport t0 = morse_via_target0(sys, -3.0 + 1e-9);
  CHECK(t0.lambda0_near_eigenvalue);
}
