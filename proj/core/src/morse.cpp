#include "maslov/morse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

namespace maslov {

const char* to_string(MorseMethod m) {
  switch (m) {
    case MorseMethod::target0: return "target0";
    case MorseMethod::targetplus: return "targetplus";
    case MorseMethod::corollary: return "corollary";
  }
  return "?";
}

bool check_boundary_inconjugate(const HalfLineSystem& sys, double lambda_inf,
                                double angle_tol) {
  if (lambda_inf <= 0.0) throw Error("check_boundary_inconjugate: lambda_inf must be positive");
  const AsymptoticData asym = asymptotic_data(sys.model, -lambda_inf);
  return intersection_dimension(initial_frame(sys.bc), asym.frame_decay, angle_tol) == 0;
}

namespace {

class Engine {
public:
  Engine(const HalfLineSystem& sys, double lambda0, const EngineOptions& opts)
      : sys_(sys), lambda0_(lambda0), opts_(opts), ell1_0_(initial_frame(sys.bc)) {
    kappa_ = essential_edge(sys.model.P_plus, sys.model.V_plus, sys.model.Q_plus).kappa;
    if (!(lambda0_ < kappa_))
      throw AssumptionError("morse: lambda0 must lie below the essential spectrum edge");
    vp_ = vertex_projectors(sys.bc);
    resolve_lambda_inf();
    resolve_x_inf();
  }

  MorseReport run(MorseMethod method) {
    switch (method) {
      case MorseMethod::target0: return run_target0();
      case MorseMethod::targetplus: return run_targetplus();
      case MorseMethod::corollary: return run_corollary();
    }
    throw Error("morse: unknown method");
  }

private:
  void resolve_lambda_inf() {
    double lam = opts_.lambda_inf > 0.0 ? opts_.lambda_inf
                                        : lambda_infinity_bound(sys_.model, vp_);
    lam = std::max(lam, -lambda0_ + 1.0);
    int bumps = 0;
    while (!check_boundary_inconjugate(sys_, lam)) {
      if (++bumps > opts_.max_bumps)
        throw NumericalError("morse: boundary inconjugacy unobtainable within bump budget");
      lam = lam * opts_.bump_factor + opts_.bump_add;
    }
    lambda_inf_ = lam;
  }

  void resolve_x_inf() {
    if (opts_.x_inf > 0.0) {
      trunc_.x_inf = opts_.x_inf;
      trunc_.settle_tol = opts_.settle_tol;
      trunc_.max_x = opts_.max_x;
      return;
    }
    SettleOptions sopts;
    sopts.settle_tol = opts_.settle_tol;
    sopts.max_x = opts_.max_x;
    sopts.ode = opts_.evolve.ode;
    trunc_ = settle_truncation(sys_, {-lambda_inf_, lambda0_}, sopts);
  }

  const FramePath& decaying_path(double lambda) {
    auto it = decay_paths_.find(lambda);
    if (it == decay_paths_.end()) {
      auto path = std::make_shared<FramePath>(
          evolve_decaying_frame(sys_, lambda, trunc_, opts_.evolve));
      it = decay_paths_.emplace(lambda, std::move(path)).first;
    }
    return *it->second;
  }

  const FramePath& boundary_path(double lambda) {
    auto it = bdry_paths_.find(lambda);
    if (it == bdry_paths_.end()) {
      auto path = std::make_shared<FramePath>(
          evolve_boundary_frame(sys_, lambda, {0.0, trunc_.x_inf}, opts_.evolve));
      it = bdry_paths_.emplace(lambda, std::move(path)).first;
    }
    return *it->second;
  }

  LagrangianFrame ell2_at0(double lambda) {
    auto it = ell2_at0_.find(lambda);
    if (it == ell2_at0_.end()) {
      const FramePath path = evolve_decaying_frame(sys_, lambda, trunc_, opts_.evolve);
      track_defect(path.max_defect());
      it = ell2_at0_.emplace(lambda, path.at(0.0)).first;
    }
    return it->second;
  }

  LagrangianFrame ell1_at_xinf(double lambda) {
    auto it = ell1_xinf_.find(lambda);
    if (it == ell1_xinf_.end()) {
      const FramePath path =
          evolve_boundary_frame(sys_, lambda, {0.0, trunc_.x_inf}, opts_.evolve);
      track_defect(path.max_defect());
      it = ell1_xinf_.emplace(lambda, path.at(trunc_.x_inf)).first;
    }
    return it->second;
  }

  LagrangianFrame asym_decay(double lambda) const {
    return asymptotic_data(sys_.model, lambda).frame_decay;
  }

  void track_defect(double d) { max_lagrangian_defect_ = std::max(max_lagrangian_defect_, d); }

  SpectralFlowResult shelf(FrameFn f1, FrameFn f2, double a, double b) {
    auto res = maslov_flow(std::move(f1), std::move(f2), a, b, opts_.track);
    max_unitarity_defect_ = std::max(max_unitarity_defect_, res.max_unitarity_defect);
    return res;
  }

  void monotonicity_flags(const SpectralFlowResult& flow, int expected_dir,
                          const char* shelf_name, MorseReport& rep) const {
    for (const auto& cp : flow.conjugate_points) {
      if (cp.kind != ConjugatePoint::Kind::interior) continue;
      for (int d : cp.track_directions)
        if (d != 0 && d != expected_dir) {
          std::ostringstream os;
          os << shelf_name << " shelf: crossing against the monotone direction at t=" << cp.t;
          rep.flags.push_back(os.str());
        }
    }
  }

  void finish(MorseReport& rep) {
    rep.box.lambda0 = lambda0_;
    rep.box.lambda_inf = lambda_inf_;
    rep.box.x_inf = trunc_.x_inf;
    rep.max_unitarity_defect = max_unitarity_defect_;
    rep.max_lagrangian_defect = max_lagrangian_defect_;
    if (rep.box.loop_sum() != 0) {
      std::ostringstream os;
      os << "maslov box loop sum " << rep.box.loop_sum() << " != 0";
      rep.flags.push_back(os.str());
    }
    if (rep.box.left.maslov_index != 0)
      rep.flags.push_back("left shelf registered crossings despite lambda_inf bound");
    rep.lambda0_near_eigenvalue =
        intersection_dimension(ell1_0_, ell2_at0(lambda0_), opts_.eig_angle_tol) > 0;
    if (rep.lambda0_near_eigenvalue)
      rep.flags.push_back(
          "lambda0 is within tolerance of an eigenvalue; count excludes the degenerate lambda0");
  }

  MorseReport run_target0() {
    MorseReport rep;
    rep.method = MorseMethod::target0;
    const LagrangianFrame l1 = ell1_0_;
    FrameFn f1 = [l1](double) { return l1; };

    // right: fixed boundary target vs decaying frame in x
    {
      const FramePath& path = decaying_path(lambda0_);
      track_defect(path.max_defect());
      rep.box.right = shelf(f1, [&path](double x) { return path.at(x); }, 0.0, trunc_.x_inf);
    }
    // top: explicit asymptotic frames, lambda falling
    rep.box.top = shelf(
        f1, [this](double lam) { return asym_decay(lam); }, lambda0_, -lambda_inf_);
    // bottom: decaying frame at the vertex, lambda rising
    rep.box.bottom = shelf(
        f1, [this](double lam) { return ell2_at0(lam); }, -lambda_inf_, lambda0_);
    // left: x falling at -lambda_inf
    {
      const FramePath& path = decaying_path(-lambda_inf_);
      track_defect(path.max_defect());
      rep.box.left = shelf(f1, [&path](double x) { return path.at(x); }, trunc_.x_inf, 0.0);
    }

    monotonicity_flags(rep.box.bottom, -1, "bottom", rep);
    monotonicity_flags(rep.box.top, +1, "top", rep);

    rep.morse_index = rep.box.right.maslov_index + rep.box.top.maslov_index;
    if (-rep.box.bottom.maslov_index != rep.morse_index)
      rep.flags.push_back("bottom shelf count disagrees with the assembled Morse index");
    finish(rep);
    return rep;
  }

  MorseReport run_targetplus() {
    MorseReport rep;
    rep.method = MorseMethod::targetplus;

    // targets are the seeded decaying frames at x_inf
    FrameFn target = [this](double lam) { return asym_decay(lam); };
    const LagrangianFrame target0 = asym_decay(lambda0_);
    const LagrangianFrame target_inf = asym_decay(-lambda_inf_);
    const LagrangianFrame l1 = ell1_0_;

    // bottom: constant boundary plane vs asymptotic target, lambda rising
    rep.box.bottom = shelf([l1](double) { return l1; }, target, -lambda_inf_, lambda0_);
    // right: boundary frame evolving in x vs fixed target at lambda0
    {
      const FramePath& path = boundary_path(lambda0_);
      track_defect(path.max_defect());
      rep.box.right = shelf([&path](double x) { return path.at(x); },
                            [target0](double) { return target0; }, 0.0, trunc_.x_inf);
    }
    // top: boundary frame at x_inf vs asymptotic target, lambda falling
    rep.box.top = shelf([this](double lam) { return ell1_at_xinf(lam); }, target, lambda0_,
                        -lambda_inf_);
    // left: x falling at -lambda_inf
    {
      const FramePath& path = boundary_path(-lambda_inf_);
      track_defect(path.max_defect());
      rep.box.left = shelf([&path](double x) { return path.at(x); },
                           [target_inf](double) { return target_inf; }, trunc_.x_inf, 0.0);
    }

    rep.morse_index = -rep.box.right.maslov_index - rep.box.bottom.maslov_index;
    if (rep.box.top.maslov_index != rep.morse_index)
      rep.flags.push_back("top shelf count disagrees with the assembled Morse index");
    finish(rep);
    return rep;
  }

  MorseReport run_corollary() {
    MorseReport rep;
    rep.method = MorseMethod::corollary;
    const int n = sys_.model.n;
    const LagrangianFrame dirichlet = LagrangianFrame::dirichlet(n);
    const LagrangianFrame l1 = ell1_0_;
    const AsymptoticData asym0 = asymptotic_data(sys_.model, lambda0_);

    // preconditions
    if (intersection_dimension(l1, ell2_at0(lambda0_), opts_.eig_angle_tol) > 0)
      throw AssumptionError("corollary: lambda0 is an eigenvalue (l1(0) meets l2(0;lambda0))");
    if (intersection_dimension(l1, dirichlet) > 0)
      throw AssumptionError("corollary: l1(0) intersects the Dirichlet plane");
    if (intersection_dimension(l1, asym0.frame_decay) > 0)
      throw AssumptionError("corollary: l1(0) intersects the asymptotic decaying plane");

    rep.correction = dirichlet_exchange_correction(sys_.bc, asym0);

    FrameFn fd = [dirichlet](double) { return dirichlet; };
    // bottom: two constant planes
    rep.box.bottom = shelf([l1](double) { return l1; }, fd, -lambda_inf_, lambda0_);
    // right: boundary frame vs Dirichlet target
    {
      const FramePath& path = boundary_path(lambda0_);
      track_defect(path.max_defect());
      rep.box.right =
          shelf([&path](double x) { return path.at(x); }, fd, 0.0, trunc_.x_inf);
    }
    // top: boundary frame at x_inf vs Dirichlet, lambda falling
    rep.box.top =
        shelf([this](double lam) { return ell1_at_xinf(lam); }, fd, lambda0_, -lambda_inf_);
    // left
    {
      const FramePath& path = boundary_path(-lambda_inf_);
      track_defect(path.max_defect());
      rep.box.left =
          shelf([&path](double x) { return path.at(x); }, fd, trunc_.x_inf, 0.0);
    }

    // the lambda-shelf against the asymptotic target, as in the assembled formula
    const SpectralFlowResult ell2plus_shelf = shelf(
        [l1](double) { return l1; }, [this](double lam) { return asym_decay(lam); },
        -lambda_inf_, lambda0_);
    rep.ell2plus_shelf_index = ell2plus_shelf.maslov_index;

    const double value = -static_cast<double>(rep.box.right.maslov_index) - rep.correction -
                         static_cast<double>(rep.ell2plus_shelf_index);
    const double rounded = std::round(value);
    if (std::abs(value - rounded) > 1e-9)
      throw NumericalError("corollary: assembled Morse count is not an integer");
    rep.morse_index = static_cast<int>(rounded);

    monotonicity_flags(rep.box.right, -1, "right(dirichlet)", rep);
    finish(rep);
    return rep;
  }

  const HalfLineSystem& sys_;
  double lambda0_ = 0.0;
  EngineOptions opts_;
  LagrangianFrame ell1_0_;
  VertexProjectors vp_;
  double kappa_ = 0.0;
  double lambda_inf_ = 0.0;
  TruncationConfig trunc_;
  double max_unitarity_defect_ = 0.0;
  double max_lagrangian_defect_ = 0.0;

  std::map<double, std::shared_ptr<FramePath>> decay_paths_;
  std::map<double, std::shared_ptr<FramePath>> bdry_paths_;
  std::map<double, LagrangianFrame> ell2_at0_;
  std::map<double, LagrangianFrame> ell1_xinf_;
};

} // namespace

MorseReport morse_via_target0(const HalfLineSystem& sys, double lambda0,
                              const EngineOptions& opts) {
  Engine eng(sys, lambda0, opts);
  return eng.run(MorseMethod::target0);
}

MorseReport morse_via_targetplus(const HalfLineSystem& sys, double lambda0,
                                 const EngineOptions& opts) {
  Engine eng(sys, lambda0, opts);
  return eng.run(MorseMethod::targetplus);
}

MorseReport morse_via_corollary(const HalfLineSystem& sys, double lambda0,
                                const EngineOptions& opts) {
  Engine eng(sys, lambda0, opts);
  return eng.run(MorseMethod::corollary);
}

} // namespace maslov
