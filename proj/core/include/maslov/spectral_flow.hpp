#ifndef MASLOV_SPECTRAL_FLOW_HPP
#define MASLOV_SPECTRAL_FLOW_HPP

#include "maslov/symplectic.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace maslov {

using FrameFn = std::function<LagrangianFrame(double)>;

struct TrackOptions {
  double angle_cap = 0.1;          // max eigenangle motion per accepted step
  double at_minus_one_tol = 1e-6;  // |theta - pi| declaring "at -1"
  double t_refine_rel = 1e-9;      // crossing localization, relative to span
  double h_init_frac = 5e-3;       // initial step as fraction of span
  double h_min_frac = 1e-12;
  long max_samples = 200000;
};

/// Sampled path of the pair matrix with matched, unwrapped eigenangle tracks.
struct UnitaryPath {
  std::vector<double> ts;
  std::vector<std::vector<double>> theta; // theta[sample][track], unwrapped
  std::vector<double> matching_residual;  // total angular displacement per step
  std::vector<std::string> flags;
  double max_unitarity_defect = 0.0;
  FrameFn f1, f2;
  TrackOptions opts;

  int tracks() const { return ts.empty() ? 0 : static_cast<int>(theta.front().size()); }
  /// Full matched angle vector at an arbitrary parameter, continued from the
  /// nearest stored sample.
  std::vector<double> eval(double t) const;
};

struct ConjugatePoint {
  double t = 0.0;
  double t_end = 0.0; // > t for dwells
  int multiplicity = 0;
  std::vector<int> track_directions; // contribution of each participating track
  int net = 0;
  enum class Kind { interior, left_endpoint, right_endpoint } kind = Kind::interior;
  bool dwell = false;
};

struct SpectralFlowResult {
  std::vector<ConjugatePoint> conjugate_points;
  int maslov_index = 0;
  std::vector<std::string> flags;
  double max_unitarity_defect = 0.0;
  // sampled trajectories, for export and diagnostics
  std::vector<double> ts;
  std::vector<std::vector<double>> theta;
};

/// Samples W(t) adaptively over [t0, t1] (t1 < t0 reverses orientation) and
/// assigns eigenvalues to continuous tracks by minimal circular displacement.
UnitaryPath track_path(FrameFn f1, FrameFn f2, double t0, double t1,
                       const TrackOptions& opts = {});

/// Signed count of eigenvalue passages through -1 with the endpoint rules:
/// interior counterclockwise crossing +m, clockwise -m; departures at the
/// start count -m when clockwise and 0 otherwise; arrivals at the end count
/// +m when counterclockwise and 0 otherwise; dwellers contribute only at
/// arrival/departure by the same rules.
SpectralFlowResult maslov_index(const UnitaryPath& path);

SpectralFlowResult maslov_flow(FrameFn f1, FrameFn f2, double t0, double t1,
                               const TrackOptions& opts = {});

/// Definiteness of the crossing form X* J dX/dt at t_star, computed from a
/// gauge-aligned finite difference of the frames; slot = 1 applies the minus
/// sign convention for the first slot. Returns +1 (all eigenvalues rotate
/// counterclockwise with increasing t), -1 (clockwise), 0 (indefinite or
/// below the resolution; caller falls back to tracked angle velocities).
int crossing_form_direction(const FrameFn& frames, int slot, double t_star, double fd_step);

/// CSV dump: t, theta_1..theta_n.
void trajectory_to_csv(const UnitaryPath& path, std::ostream& os);

} // namespace maslov

#endif
