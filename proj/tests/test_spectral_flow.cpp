#include "maslov/spectral_flow.hpp"

#include "support/lagrangian_test_utils.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace maslov;
using maslov::testing::random_lagrangian;
using maslov::testing::random_unitary_symplectic;

namespace {

LagrangianFrame rotor(double angle) {
  return LagrangianFrame(Matrix::Constant(1, 1, std::cos(angle)),
                         Matrix::Constant(1, 1, std::sin(angle)));
}

FrameFn dirichlet_fn(int n) {
  return [n](double) { return LagrangianFrame::dirichlet(n); };
}

} // namespace

TEST_CASE("constant coincident path has index 0") {
  std::mt19937_64 rng(1);
  const LagrangianFrame f = random_lagrangian(2, rng);
  const auto res = maslov_flow([f](double) { return f; }, [f](double) { return f; }, 0.0, 1.0);
  CHECK(res.maslov_index == 0);
  // both eigenangles pinned at -1 over the whole path
  REQUIRE(res.conjugate_points.size() == 1);
  CHECK(res.conjugate_points[0].multiplicity == 2);
  CHECK(res.conjugate_points[0].net == 0);
}

TEST_CASE("constant transverse pair has no conjugate points") {
  const auto res =
      maslov_flow(dirichlet_fn(1), [](double) { return LagrangianFrame::neumann(1); }, 0.0, 1.0);
  CHECK(res.maslov_index == 0);
  CHECK(res.conjugate_points.empty());
}

TEST_CASE("rotating line against the Dirichlet plane") {
  // f2(t) = (cos t; sin t) vs Dirichlet: W = e^{-2it}; theta falls at rate 2;
  // the plane alignment at t = pi/2 is a clockwise crossing.
  const auto res = maslov_flow(dirichlet_fn(1), [](double t) { return rotor(t); }, 0.0, M_PI);
  CHECK(res.maslov_index == -1);
  REQUIRE(res.conjugate_points.size() == 1);
  const auto& cp = res.conjugate_points[0];
  CHECK(cp.t == doctest::Approx(M_PI / 2).epsilon(1e-8));
  CHECK(cp.multiplicity == 1);
  CHECK(cp.net == -1);
  CHECK(cp.kind == ConjugatePoint::Kind::interior);

  // reversed orientation negates the index
  const auto rev = maslov_flow(dirichlet_fn(1), [](double t) { return rotor(t); }, M_PI, 0.0);
  CHECK(rev.maslov_index == +1);
}

TEST_CASE("endpoint conventions") {
  // start exactly on the Dirichlet plane: theta(0) = pi
  // departing clockwise (theta decreasing) decrements
  const auto dep_cw =
      maslov_flow(dirichlet_fn(1), [](double t) { return rotor(M_PI / 2 + t); }, 0.0, 1.0);
  CHECK(dep_cw.maslov_index == -1);
  REQUIRE(dep_cw.conjugate_points.size() == 1);
  CHECK(dep_cw.conjugate_points[0].kind == ConjugatePoint::Kind::left_endpoint);

  // departing counterclockwise contributes nothing
  const auto dep_ccw =
      maslov_flow(dirichlet_fn(1), [](double t) { return rotor(M_PI / 2 - t); }, 0.0, 1.0);
  CHECK(dep_ccw.maslov_index == 0);

  // arriving counterclockwise increments; the plane angle runs opposite to
  // the pair-matrix angle, so rotor(pi - t) is the counterclockwise arrival
  const auto arr_ccw =
      maslov_flow(dirichlet_fn(1), [](double t) { return rotor(M_PI - t); }, 0.0, M_PI / 2);
  CHECK(arr_ccw.maslov_index == +1);
  REQUIRE(!arr_ccw.conjugate_points.empty());
  CHECK(arr_ccw.conjugate_points.back().kind == ConjugatePoint::Kind::right_endpoint);

  // arriving clockwise contributes nothing
  const auto arr_cw =
      maslov_flow(dirichlet_fn(1), [](double t) { return rotor(t); }, 0.0, M_PI / 2);
  CHECK(arr_cw.maslov_index == 0);
}

TEST_CASE("dwell handling") {
  // g ramps to pi/2, rests, then continues: a slow clockwise passage
  auto g = [](double t) {
    if (t <= 1.0) return t * M_PI / 2;
    if (t <= 2.0) return M_PI / 2;
    return M_PI / 2 + (t - 2.0) * M_PI / 2;
  };
  const auto through =
      maslov_flow(dirichlet_fn(1), [&](double t) { return rotor(g(t)); }, 0.0, 3.0);
  CHECK(through.maslov_index == -1);

  // rests at the plane and returns: a graze, net zero
  auto g2 = [](double t) {
    if (t <= 1.0) return t * M_PI / 2;
    if (t <= 2.0) return M_PI / 2;
    return M_PI / 2 - (t - 2.0) * M_PI / 2;
  };
  const auto graze =
      maslov_flow(dirichlet_fn(1), [&](double t) { return rotor(g2(t)); }, 0.0, 3.0);
  CHECK(graze.maslov_index == 0);

  // ends resting on the plane after a clockwise arrival: no contribution
  const auto rest_end =
      maslov_flow(dirichlet_fn(1), [&](double t) { return rotor(g(t)); }, 0.0, 1.5);
  CHECK(rest_end.maslov_index == 0);
}

TEST_CASE("path additivity") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 1 + trial % 3;
    const Matrix u0 = random_unitary_symplectic(n, rng);
    const Matrix k = [&] {
      Matrix a = maslov::testing::random_hermitian(n, rng);
      Matrix b = maslov::testing::random_hermitian(n, rng);
      const Complex i(0.0, 1.0);
      Matrix kk = Matrix::Zero(2 * n, 2 * n);
      kk.topLeftCorner(n, n) = i * a;
      kk.bottomRightCorner(n, n) = i * a;
      kk.topRightCorner(n, n) = -b;
      kk.bottomLeftCorner(n, n) = b;
      return kk;
    }();
    FrameFn path = [u0, k, n](double t) {
      const Matrix u = u0 * maslov::testing::matrix_exp_skew(Matrix(t * k));
      return LagrangianFrame::from_stacked(Matrix(u.leftCols(n)));
    };
    const LagrangianFrame target = random_lagrangian(n, rng);
    FrameFn tgt = [target](double) { return target; };

    std::uniform_real_distribution<double> mid(0.2, 0.8);
    const double b = mid(rng);
    const int whole = maslov_flow(tgt, path, 0.0, 1.0).maslov_index;
    const int left = maslov_flow(tgt, path, 0.0, b).maslov_index;
    const int right = maslov_flow(tgt, path, b, 1.0).maslov_index;
    CHECK(whole == left + right);
  }
}

TEST_CASE("homotopy invariance under endpoint-fixed perturbations") {
  std::mt19937_64 rng(23);
  const int n = 2;
  const Matrix u0 = random_unitary_symplectic(n, rng);
  const Matrix k = [&] {
    const Complex i(0.0, 1.0);
    Matrix a = maslov::testing::random_hermitian(n, rng);
    Matrix b = maslov::testing::random_hermitian(n, rng);
    Matrix kk = Matrix::Zero(2 * n, 2 * n);
    kk.topLeftCorner(n, n) = i * a;
    kk.bottomRightCorner(n, n) = i * a;
    kk.topRightCorner(n, n) = -b;
    kk.bottomLeftCorner(n, n) = b;
    return kk;
  }();
  const Matrix kp = [&] {
    const Complex i(0.0, 1.0);
    Matrix a = maslov::testing::random_hermitian(n, rng);
    Matrix b = maslov::testing::random_hermitian(n, rng);
    Matrix kk = Matrix::Zero(2 * n, 2 * n);
    kk.topLeftCorner(n, n) = i * a;
    kk.bottomRightCorner(n, n) = i * a;
    kk.topRightCorner(n, n) = -b;
    kk.bottomLeftCorner(n, n) = b;
    return kk;
  }();

  const LagrangianFrame target = random_lagrangian(n, rng);
  FrameFn tgt = [target](double) { return target; };
  auto base = [&](double t) {
    const Matrix u = u0 * maslov::testing::matrix_exp_skew(Matrix(t * k));
    return LagrangianFrame::from_stacked(Matrix(u.leftCols(n)));
  };
  const int index0 = maslov_flow(tgt, base, 0.0, 1.0).maslov_index;
  for (double eps : {0.02, 0.05}) {
    FrameFn pert = [&, eps](double t) {
      const double bump = eps * std::sin(M_PI * t);
      const Matrix u = maslov::testing::matrix_exp_skew(Matrix(bump * kp));
      const LagrangianFrame f = base(t);
      return LagrangianFrame::from_stacked(Matrix(u * f.stacked()));
    };
    CHECK(maslov_flow(tgt, pert, 0.0, 1.0).maslov_index == index0);
  }
}

TEST_CASE("eigenvalue-set fidelity along tracked paths") {
  std::mt19937_64 rng(31);
  const int n = 3;
  const LagrangianFrame target = random_lagrangian(n, rng);
  const Matrix u0 = random_unitary_symplectic(n, rng);
  const Matrix k = [&] {
    const Complex i(0.0, 1.0);
    Matrix a = maslov::testing::random_hermitian(n, rng);
    Matrix b = maslov::testing::random_hermitian(n, rng);
    Matrix kk = Matrix::Zero(2 * n, 2 * n);
    kk.topLeftCorner(n, n) = i * a;
    kk.bottomRightCorner(n, n) = i * a;
    kk.topRightCorner(n, n) = -b;
    kk.bottomLeftCorner(n, n) = b;
    return kk;
  }();
  FrameFn path = [u0, k, n](double t) {
    const Matrix u = u0 * maslov::testing::matrix_exp_skew(Matrix(t * k));
    return LagrangianFrame::from_stacked(Matrix(u.leftCols(n)));
  };
  const UnitaryPath up = track_path([target](double) { return target; }, path, 0.0, 1.0);
  CHECK(up.max_unitarity_defect <= 1e-8);
  for (size_t s = 0; s < up.ts.size(); s += std::max<size_t>(1, up.ts.size() / 17)) {
    const auto fresh = unitary_eigenangles(pair_matrix(target, path(up.ts[s])).W);
    // compare multisets on the circle
    for (double th : up.theta[s]) {
      double best = 10.0;
      for (double f : fresh) best = std::min(best, std::abs(wrap_angle(th - f)));
      CHECK(best <= 1e-8);
    }
  }
}

TEST_CASE("crossing form direction") {
  // the pair-matrix angle runs opposite to the plane angle: a plane rotating
  // down drives the eigenvalues counterclockwise (slot 2, positive form)
  FrameFn falling = [](double t) { return rotor(M_PI / 3 - 0.4 * t); };
  CHECK(crossing_form_direction(falling, 2, 0.5, 1e-4) == +1);
  FrameFn rising = [](double t) { return rotor(0.1 + 0.4 * t); };
  CHECK(crossing_form_direction(rising, 2, 0.5, 1e-4) == -1);
  // constant path: zero form
  FrameFn flat = [](double) { return rotor(0.3); };
  CHECK(crossing_form_direction(flat, 2, 0.5, 1e-4) == 0);

  // finite-difference direction agrees with the tracked angle velocity
  const auto up = track_path(dirichlet_fn(1), rising, 0.0, 1.0);
  CHECK(up.theta.back()[0] < up.theta.front()[0]);
}

TEST_CASE("trajectory csv") {
  const UnitaryPath up =
      track_path(dirichlet_fn(1), [](double t) { return rotor(t); }, 0.0, 1.0);
  std::ostringstream os;
  trajectory_to_csv(up, os);
  CHECK(os.str().rfind("t,theta_1", 0) == 0);
}
