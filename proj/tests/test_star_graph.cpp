#include "maslov/star_graph.hpp"
#include "maslov/asymptotics.hpp"
#include "maslov/evolution.hpp"
#include "maslov/spectral_flow.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

using namespace maslov;

TEST_CASE("profile identities") {
  for (double p : {0.5, 1.0, 2.0}) {
    StarGraphNLS cfg;
    cfg.p = p;
    for (double x : {0.0, 0.3, 1.1, 4.0}) {
      const double s = cfg.profile(x);
      CHECK(cfg.profile_d1(x) == doctest::Approx(-s * std::tanh(p * x)));
      const double t = std::tanh(p * x), sech = 1.0 / std::cosh(p * x);
      CHECK(cfg.profile_d2(x) == doctest::Approx(s * (t * t - p * sech * sech)));
      // d2 is the actual second derivative: central difference check
      const double h = 1e-5;
      const double fd2 = (cfg.profile(x + h) - 2.0 * s + cfg.profile(x - h)) / (h * h);
      CHECK(cfg.profile_d2(x) == doctest::Approx(fd2).epsilon(1e-5));
    }
  }
}

TEST_CASE("build_system") {
  StarGraphNLS cfg;
  cfg.n = 3;
  cfg.p = 1.0;
  const HalfLineSystem sys = build_system(cfg);
  CHECK(std::real(sys.model.V(0.0)(0, 0)) == doctest::Approx(-5.0)); // 1 - 6 sech^2(0)
  CHECK(essential_edge(sys.model.P_plus, sys.model.V_plus, sys.model.Q_plus).kappa ==
        doctest::Approx(1.0));
  CHECK(sys.model.C_V == doctest::Approx(5.0));

  for (double p : {0.5, 1.0, 2.0})
    for (int n : {2, 3, 5}) {
      StarGraphNLS c2;
      c2.p = p;
      c2.n = n;
      for (auto op : {StarGraphNLS::Operator::Lplus, StarGraphNLS::Operator::Lminus}) {
        c2.op = op;
        const HalfLineSystem s2 = build_system(c2);
        std::vector<double> grid;
        for (int k = 0; k <= 60; ++k) grid.push_back(0.5 * k);
        CHECK(validate_system(s2.model, s2.bc, grid).ok);
      }
    }
}

TEST_CASE("analytic q") {
  StarGraphNLS cfg;
  cfg.p = 1.0;
  CHECK(std::abs(analytic_q(cfg, 0.0) - Complex(-1.0, 0.0)) < 1e-12);

  // q(xbar) = +1 at tanh^2(p xbar) = p sech^2(p xbar)
  for (double p : {0.5, 1.0, 2.0}) {
    StarGraphNLS c;
    c.p = p;
    const double xbar = std::atanh(std::sqrt(p / (1.0 + p))) / p;
    CHECK(std::abs(analytic_q(c, xbar) - Complex(1.0, 0.0)) < 1e-10);
    // far field: q approaches i
    CHECK(std::abs(analytic_q(c, 40.0 / p) - Complex(0.0, 1.0)) < 1e-6);
    // |q| = 1 everywhere
    for (double x : {0.2, 0.9, 2.3}) CHECK(std::abs(std::abs(analytic_q(c, x)) - 1.0) < 1e-12);
  }
}

TEST_CASE("analytic top shelf") {
  StarGraphNLS cfg;
  cfg.n = 4;
  const auto at0 = analytic_top_shelf(cfg, 0.0);
  REQUIRE(at0.size() == 4);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(at0[k] - Complex(0.0, 1.0)) < 1e-12);
  CHECK(std::abs(at0[3] - Complex(0.0, -1.0)) < 1e-12);

  const auto atm3 = analytic_top_shelf(cfg, -3.0);
  CHECK(std::abs(atm3[0] - Complex(-0.6, 0.8)) < 1e-12); // (1+2i)/(1-2i)

  // sweep: no eigenvalue approaches -1 for lambda in [-50, 0]
  double min_dist = 10.0;
  for (int k = 0; k <= 500; ++k) {
    const double lam = -50.0 + 0.1 * k;
    for (const Complex ev : analytic_top_shelf(cfg, lam))
      min_dist = std::min(min_dist, std::abs(ev - Complex(-1.0, 0.0)));
  }
  CHECK(min_dist > 0.1);

  CHECK_THROWS_AS(analytic_top_shelf(cfg, 1.0), NumericalError);
}

TEST_CASE("numerical decaying frame contains the differentiated profile") {
  StarGraphNLS cfg;
  cfg.n = 3;
  cfg.p = 1.0;
  const HalfLineSystem sys = build_system(cfg);
  TruncationConfig trunc;
  trunc.x_inf = 14.0;
  const FramePath path = evolve_decaying_frame(sys, 0.0, trunc);

  for (double x : {0.0, 0.8, 2.0, 6.0}) {
    // the direction (s' 1; s'' 1) solves the lambda = 0 system on each edge
    Eigen::VectorXcd v(6);
    for (int j = 0; j < 3; ++j) {
      v(j) = cfg.profile_d1(x);
      v(3 + j) = cfg.profile_d2(x);
    }
    v.normalize();
    const Matrix q = path.at(x).orthonormalized().stacked();
    const double resid = (v - q * (q.adjoint() * v)).norm();
    CHECK(resid < 1e-6);
  }
}

TEST_CASE("right shelf eigenvalues match the analytic multiset") {
  StarGraphNLS cfg;
  cfg.n = 3;
  cfg.p = 1.0;
  const HalfLineSystem sys = build_system(cfg);
  TruncationConfig trunc;
  trunc.x_inf = 14.0;
  const FramePath path = evolve_decaying_frame(sys, 0.0, trunc);
  const LagrangianFrame l1 = initial_frame(sys.bc);

  for (double x : {0.05, 0.5, 1.3, 3.0, 8.0}) {
    const auto pm = pair_matrix(l1, path.at(x));
    Eigen::ComplexEigenSolver<Matrix> es(pm.W);
    std::vector<Complex> numeric;
    for (int k = 0; k < 3; ++k) numeric.push_back(es.eigenvalues()(k));

    const Complex q = analytic_q(cfg, x);
    std::vector<Complex> expected{q, q, -q}; // -a_j q with a = {-1, -1, +1}
    // multiset match
    for (const Complex e : expected) {
      double best = 10.0;
      for (const Complex nv : numeric) best = std::min(best, std::abs(nv - e));
      CHECK(best < 1e-6);
    }
  }
}
