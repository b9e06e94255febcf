#include "maslov/spectral_flow.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace maslov {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Match the unordered angle multiset `fresh` (principal values) against the
// unwrapped reference `ref`. The optimal circular assignment is order
// preserving, hence a cyclic shift of the sorted orders. Returns ref +
// displacement (unwrapped) and the total/max displacement.
std::vector<double> match_angles(const std::vector<double>& ref,
                                 const std::vector<double>& fresh, double& total_disp,
                                 double& max_disp) {
  const size_t n = ref.size();
  std::vector<size_t> ref_order(n), fresh_order(n);
  std::iota(ref_order.begin(), ref_order.end(), 0u);
  std::iota(fresh_order.begin(), fresh_order.end(), 0u);
  std::sort(ref_order.begin(), ref_order.end(), [&](size_t a, size_t b) {
    return wrap_angle(ref[a]) < wrap_angle(ref[b]);
  });
  std::sort(fresh_order.begin(), fresh_order.end(),
            [&](size_t a, size_t b) { return fresh[a] < fresh[b]; });

  double best_total = std::numeric_limits<double>::infinity();
  size_t best_off = 0;
  for (size_t off = 0; off < n; ++off) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i)
      total += std::abs(wrap_angle(fresh[fresh_order[(i + off) % n]] - ref[ref_order[i]]));
    if (total < best_total) {
      best_total = total;
      best_off = off;
    }
  }

  std::vector<double> out(n);
  max_disp = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const size_t rj = ref_order[i];
    const double d = wrap_angle(fresh[fresh_order[(i + best_off) % n]] - ref[rj]);
    out[rj] = ref[rj] + d;
    max_disp = std::max(max_disp, std::abs(d));
  }
  total_disp = best_total;
  return out;
}

std::vector<double> frame_pair_angles(const FrameFn& f1, const FrameFn& f2, double t,
                                      double* defect = nullptr) {
  const PairMatrix pm = pair_matrix(f1(t), f2(t));
  if (defect) *defect = pm.unitarity_defect;
  return unitary_eigenangles(pm.W);
}

size_t nearest_sample(const std::vector<double>& ts, double t) {
  size_t best = 0;
  double dist = std::numeric_limits<double>::infinity();
  // ts is monotone in either direction; a scan is cheap at these sizes
  for (size_t k = 0; k < ts.size(); ++k) {
    const double d = std::abs(ts[k] - t);
    if (d < dist) {
      dist = d;
      best = k;
    } else if (d > dist) {
      break;
    }
  }
  return best;
}

} // namespace

std::vector<double> UnitaryPath::eval(double t) const {
  const size_t idx = nearest_sample(ts, t);
  double total = 0.0, maxd = 0.0;
  return match_angles(theta[idx], frame_pair_angles(f1, f2, t), total, maxd);
}

UnitaryPath track_path(FrameFn f1, FrameFn f2, double t0, double t1, const TrackOptions& opts) {
  UnitaryPath path;
  path.f1 = std::move(f1);
  path.f2 = std::move(f2);
  path.opts = opts;

  double defect = 0.0;
  std::vector<double> theta0 = frame_pair_angles(path.f1, path.f2, t0, &defect);
  path.max_unitarity_defect = defect;
  std::sort(theta0.begin(), theta0.end());
  path.ts.push_back(t0);
  path.theta.push_back(theta0);
  path.matching_residual.push_back(0.0);

  const double span = t1 - t0;
  if (span == 0.0) return path;
  const double dir = span > 0.0 ? 1.0 : -1.0;
  const double h_min = std::abs(span) * opts.h_min_frac;
  double h = span * opts.h_init_frac;
  double t = t0;
  const double arrival_slack =
      4.0 * std::numeric_limits<double>::epsilon() * std::max({std::abs(t0), std::abs(t1), 1.0});

  while (dir * (t1 - t) > arrival_slack) {
    if (static_cast<long>(path.ts.size()) > opts.max_samples)
      throw NumericalError("track_path: sample budget exhausted");
    if (dir * (t + h - t1) > 0.0) h = t1 - t;

    const double t_next = t + h;
    const auto fresh = frame_pair_angles(path.f1, path.f2, t_next, &defect);
    path.max_unitarity_defect = std::max(path.max_unitarity_defect, defect);
    double total = 0.0, maxd = 0.0;
    const auto updated = match_angles(path.theta.back(), fresh, total, maxd);

    bool reject = maxd > opts.angle_cap;
    if (!reject && maxd > 1e-4) {
      // midpoint consistency guards against a track aliasing a full turn
      const auto fresh_mid = frame_pair_angles(path.f1, path.f2, t + 0.5 * h);
      double tm = 0.0, mm = 0.0;
      const auto mid = match_angles(path.theta.back(), fresh_mid, tm, mm);
      double half_err = 0.0;
      for (size_t j = 0; j < mid.size(); ++j)
        half_err =
            std::max(half_err, std::abs(mid[j] - 0.5 * (path.theta.back()[j] + updated[j])));
      reject = half_err > std::max(0.5 * opts.angle_cap, 1e-3);
    }

    if (reject) {
      if (std::abs(h) * 0.5 < h_min) {
        std::ostringstream os;
        os << "unresolved matching near t=" << t_next << " (step displacement " << maxd << ")";
        path.flags.push_back(os.str());
      } else {
        h *= 0.5;
        continue;
      }
    }

    t = t_next;
    path.ts.push_back(t);
    path.theta.push_back(updated);
    path.matching_residual.push_back(total);
    const double grow = maxd > 1e-12 ? 0.8 * opts.angle_cap / maxd : 4.0;
    h *= std::clamp(grow, 0.3, 4.0);
  }
  return path;
}

namespace {

double nearest_level(double theta) {
  return kPi + 2.0 * kPi * std::round((theta - kPi) / (2.0 * kPi));
}

struct TrackEvent {
  double t = 0.0, t_end = 0.0;
  int direction = 0;
  bool dwell = false;
  bool at_start = false, at_end = false;
  int track = 0;
};

// Bisect the matched angle of one track to a level inside a sign-changing
// bracket.
double refine_crossing(const UnitaryPath& path, int track, double ta, double tb, double level,
                       double tol) {
  auto side = [&](double t) { return path.eval(t)[static_cast<size_t>(track)] - level; };
  double fa = side(ta);
  for (int it = 0; it < 200 && std::abs(tb - ta) > tol; ++it) {
    const double tm = 0.5 * (ta + tb);
    const double fm = side(tm);
    if ((fa <= 0.0) == (fm <= 0.0)) {
      ta = tm;
      fa = fm;
    } else {
      tb = tm;
    }
  }
  return 0.5 * (ta + tb);
}

} // namespace

SpectralFlowResult maslov_index(const UnitaryPath& path) {
  SpectralFlowResult res;
  res.flags = path.flags;
  res.max_unitarity_defect = path.max_unitarity_defect;
  res.ts = path.ts;
  res.theta = path.theta;
  if (path.ts.empty() || path.tracks() == 0) return res;
  const size_t nsamp = path.ts.size();
  const int ntracks = path.tracks();
  const double span = std::abs(path.ts.back() - path.ts.front());
  const double band = path.opts.at_minus_one_tol;
  const double t_tol = std::max(span, 1e-12) * path.opts.t_refine_rel;

  std::vector<TrackEvent> events;

  for (int j = 0; j < ntracks; ++j) {
    auto th = [&](size_t k) { return path.theta[k][static_cast<size_t>(j)]; };

    size_t k = 0;
    while (k < nsamp) {
      const double level = nearest_level(th(k));
      if (std::abs(th(k) - level) < band) {
        size_t kend = k;
        while (kend + 1 < nsamp && std::abs(th(kend + 1) - level) < band) ++kend;
        TrackEvent ev;
        ev.track = j;
        ev.at_start = (k == 0);
        ev.at_end = (kend == nsamp - 1);
        ev.dwell = true;
        ev.t = path.ts[k];
        ev.t_end = path.ts[kend];
        const int side_in = ev.at_start ? 0 : (th(k - 1) > level ? +1 : -1);
        const int side_out = ev.at_end ? 0 : (th(kend + 1) > level ? +1 : -1);
        if (ev.at_start && ev.at_end) {
          ev.direction = 0;
          res.flags.push_back("track pinned at -1 over the whole path");
        } else if (ev.at_start) {
          ev.direction = (side_out < 0) ? -1 : 0; // departure rule
        } else if (ev.at_end) {
          ev.direction = (side_in < 0) ? +1 : 0; // arrival rule
        } else {
          ev.direction = (side_out - side_in) / 2;
          if (kend == k && side_in != side_out) {
            // sharp interior passage: localize it
            ev.t = ev.t_end =
                refine_crossing(path, j, path.ts[k - 1], path.ts[kend + 1], level, t_tol);
            ev.dwell = false;
          } else if (side_in == side_out) {
            res.flags.push_back("grazing contact with -1 (net zero)");
          }
        }
        if (ev.dwell && ev.t_end - ev.t > 16.0 * t_tol && !(ev.at_start && ev.at_end)) {
          std::ostringstream os;
          os << "dwell at -1 over [" << ev.t << ", " << ev.t_end << "] on track " << j;
          res.flags.push_back(os.str());
        }
        events.push_back(ev);
        k = kend + 1;
        continue;
      }

      // transversal crossing fully between out-of-band samples
      if (k + 1 < nsamp) {
        const double a = th(k), b = th(k + 1);
        const double lv = nearest_level(0.5 * (a + b));
        if ((a - lv) * (b - lv) < 0.0 && std::abs(a - lv) >= band && std::abs(b - lv) >= band) {
          TrackEvent ev;
          ev.track = j;
          ev.direction = (b > a) ? +1 : -1;
          ev.t = ev.t_end = refine_crossing(path, j, path.ts[k], path.ts[k + 1], lv, t_tol);
          events.push_back(ev);
        }
      }
      ++k;
    }
  }

  std::sort(events.begin(), events.end(),
            [](const TrackEvent& a, const TrackEvent& b) { return a.t < b.t; });
  const double cluster_tol = std::max(span, 1e-12) * 1e-7;
  size_t i = 0;
  while (i < events.size()) {
    size_t jm = i;
    while (jm + 1 < events.size() && events[jm + 1].t - events[i].t <= cluster_tol) ++jm;
    ConjugatePoint cp;
    cp.t = events[i].t;
    cp.t_end = events[jm].t_end;
    cp.multiplicity = static_cast<int>(jm - i + 1);
    cp.kind = ConjugatePoint::Kind::interior;
    for (size_t q = i; q <= jm; ++q) {
      cp.track_directions.push_back(events[q].direction);
      cp.net += events[q].direction;
      cp.dwell = cp.dwell || events[q].dwell;
      if (events[q].at_start) cp.kind = ConjugatePoint::Kind::left_endpoint;
      if (events[q].at_end) cp.kind = ConjugatePoint::Kind::right_endpoint;
    }
    res.conjugate_points.push_back(cp);
    res.maslov_index += cp.net;
    i = jm + 1;
  }
  return res;
}

SpectralFlowResult maslov_flow(FrameFn f1, FrameFn f2, double t0, double t1,
                               const TrackOptions& opts) {
  return maslov_index(track_path(std::move(f1), std::move(f2), t0, t1, opts));
}

int crossing_form_direction(const FrameFn& frames, int slot, double t_star, double fd_step) {
  const Matrix f0 = frames(t_star).orthonormalized().stacked();
  auto aligned = [&](double t) -> Matrix {
    const Matrix f = frames(t).orthonormalized().stacked();
    const Matrix m = (f.adjoint() * f).ldlt().solve(f.adjoint() * f0);
    return f * m;
  };
  const Matrix fp = aligned(t_star + fd_step);
  const Matrix fm = aligned(t_star - fd_step);
  const Matrix df = (fp - fm) / (2.0 * fd_step);
  const int n = static_cast<int>(f0.cols());
  Matrix form = f0.adjoint() * symplectic_J(n) * df;
  if (slot == 1) form = -form;
  form = hermitize(form);
  Eigen::SelfAdjointEigenSolver<Matrix> es(form, Eigen::EigenvaluesOnly);
  const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (lo > 1e-8 * scale) return +1;
  if (hi < -1e-8 * scale) return -1;
  return 0;
}

void trajectory_to_csv(const UnitaryPath& path, std::ostream& os) {
  os << "t";
  for (int j = 0; j < path.tracks(); ++j) os << ",theta_" << (j + 1);
  os << "\n";
  for (size_t k = 0; k < path.ts.size(); ++k) {
    os << path.ts[k];
    for (double th : path.theta[k]) os << "," << th;
    os << "\n";
  }
}

} // namespace maslov
