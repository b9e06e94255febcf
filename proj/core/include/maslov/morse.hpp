#ifndef MASLOV_MORSE_HPP
#define MASLOV_MORSE_HPP

#include "maslov/evolution.hpp"
#include "maslov/hormander.hpp"
#include "maslov/spectral_flow.hpp"

#include <string>
#include <vector>

namespace maslov {

enum class MorseMethod { target0, targetplus, corollary };

const char* to_string(MorseMethod m);

/// The four tracked shelves of the rectangle in the (lambda, x) plane, in
/// traversal orientation: bottom (lambda rising at the vertex), right
/// (x rising at lambda0), top (lambda falling at the truncation), left
/// (x falling at -lambda_inf). A closed loop forces the indices to sum to 0.
struct MaslovBox {
  double lambda0 = 0.0;
  double lambda_inf = 0.0;
  double x_inf = 0.0;
  SpectralFlowResult bottom, right, top, left;

  int loop_sum() const {
    return bottom.maslov_index + right.maslov_index + top.maslov_index + left.maslov_index;
  }
};

struct MorseReport {
  int morse_index = 0;
  MorseMethod method = MorseMethod::target0;
  MaslovBox box;
  double correction = 0.0;      // Dirichlet exchange term (corollary only)
  int ell2plus_shelf_index = 0; // Mas(l1(0;.), l2+(.); rising lambda), corollary assembly
  double max_unitarity_defect = 0.0;
  double max_lagrangian_defect = 0.0;
  bool lambda0_near_eigenvalue = false;
  std::vector<std::string> flags;
};

struct EngineOptions {
  double lambda_inf = 0.0; // 0 = derive from lambda_infinity_bound (+ inconjugacy bumps)
  double x_inf = 0.0;      // 0 = settle_truncation
  double settle_tol = 1e-8;
  double max_x = 200.0;
  double bump_factor = 1.25;
  double bump_add = 0.5;
  int max_bumps = 40;
  EvolveOptions evolve;
  TrackOptions track;
  double eig_angle_tol = 1e-4; // "lambda0 is (nearly) an eigenvalue" detector
};

/// true iff l1(0) is transverse to the asymptotic decaying plane at
/// -lambda_inf. Callers bump lambda_inf upward until this holds.
bool check_boundary_inconjugate(const HalfLineSystem& sys, double lambda_inf,
                                double angle_tol = 1e-6);

/// Fixed boundary target, evolving decaying frame.
MorseReport morse_via_target0(const HalfLineSystem& sys, double lambda0,
                              const EngineOptions& opts = {});

/// Evolving boundary frame against the (numerical) asymptotic target.
MorseReport morse_via_targetplus(const HalfLineSystem& sys, double lambda0,
                                 const EngineOptions& opts = {});

/// Dirichlet-target right shelf plus the explicit exchange correction.
MorseReport morse_via_corollary(const HalfLineSystem& sys, double lambda0,
                                const EngineOptions& opts = {});

} // namespace maslov

#endif
