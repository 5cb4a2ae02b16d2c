#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

#include "tatlab/csv.hpp"
#include "tatlab/errors.hpp"
#include "tatlab/geometry.hpp"
#include "tatlab/medium.hpp"
#include "tatlab/parallel.hpp"

namespace tat {

/// Point of a bicharacteristic: position x, covector xi, time t, the constant
/// tau = c(x0)|xi0| and the flow parameter s.
struct PhasePoint {
  Vec2 x;
  Vec2 xi;
  double t = 0.0;
  double tau = 0.0;
  double s = 0.0;
};

enum class Branch { plus, minus };
enum class RayVerdict { hit_v, escaped_domain, time_exhausted, step_limit };

inline const char* to_string(Branch b) { return b == Branch::plus ? "plus" : "minus"; }
inline const char* to_string(RayVerdict v) {
  switch (v) {
    case RayVerdict::hit_v: return "hit_v";
    case RayVerdict::escaped_domain: return "escaped_domain";
    case RayVerdict::time_exhausted: return "time_exhausted";
    case RayVerdict::step_limit: return "step_limit";
  }
  return "?";
}

/// Open neighbourhood {x : dist(x, curve) < margin} of the observation arc.
struct Tube {
  Arc curve;
  double margin = 0.0;
  bool contains(Vec2 p) const { return curve.distance(p) < margin; }
};

struct RayPath {
  Branch branch = Branch::plus;
  std::vector<PhasePoint> points;
  RayVerdict verdict = RayVerdict::time_exhausted;
  std::optional<double> t_hit;
  /// Closest approach to the tube's curve (minus the margin) over the path.
  double clearance = std::numeric_limits<double>::infinity();
  double t_max = 0.0;

  const PhasePoint& back() const { return points.back(); }
};

struct RayOptions {
  /// Hard cap on integration steps; 0 selects 4x the nominal count plus slack.
  std::size_t max_steps = 0;
  /// Keep every step; otherwise only the first and last points are stored.
  /// A path that escapes ends at its last point inside the domain.
  bool keep_path = true;
  const Tube* tube = nullptr;
};

namespace detail {

struct RayRhs {
  Vec2 dx;
  Vec2 dxi;
};

inline RayRhs ray_rhs(const SpeedField& c, const Rect& domain, Vec2 x, Vec2 xi) {
  const Vec2 q = domain.clamp(x);
  const double cv = c.eval(q);
  const Vec2 g = c.grad_c2(q);
  return {-(cv * cv) * xi, 0.5 * norm2(xi) * g};
}

/// Smallest distance from the segment [a, b] to the tube curve, sampled.
inline double segment_distance(const Tube& tube, Vec2 a, Vec2 b, int samples) {
  double best = std::min(tube.curve.distance(a), tube.curve.distance(b));
  for (int i = 1; i < samples; ++i) {
    const double u = double(i) / samples;
    best = std::min(best, tube.curve.distance(a + u * (b - a)));
  }
  return best;
}

/// First parameter u in (0, 1] at which the segment enters the tube, if any.
inline std::optional<double> segment_entry(const Tube& tube, Vec2 a, Vec2 b) {
  const double len = norm(b - a);
  const double da = tube.curve.distance(a);
  const double db = tube.curve.distance(b);
  if (db >= tube.margin && std::min(da, db) >= tube.margin + len) return std::nullopt;
  const int samples = std::max(2, int(std::ceil(8.0 * len / std::max(tube.margin, 1e-300))));
  double lo = 0.0;
  std::optional<double> hi;
  for (int i = 1; i <= samples; ++i) {
    const double u = double(i) / samples;
    if (tube.contains(a + u * (b - a))) {
      hi = u;
      break;
    }
    lo = u;
  }
  if (!hi) return std::nullopt;
  double h = *hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + h);
    if (tube.contains(a + mid * (b - a)))
      h = mid;
    else
      lo = mid;
  }
  return h;
}

}  // namespace detail

/// Integrates x' = -c^2 xi, t' = tau, xi' = |xi|^2 grad(c^2) / 2, tau' = 0 with
/// classical RK4 in the flow parameter s. The plus branch starts at
/// xi(0) = -xi0 (x moves along +xi0), the minus branch at +xi0.
///
/// Stops at the first of: t reaching t_max (last step shortened), x leaving
/// `domain`, the tube being entered (when one is given), or the step cap.
inline RayPath trace_bicharacteristic(const SpeedField& field, const Rect& domain, Vec2 x0, Vec2 xi0,
                                      Branch branch, double t_max, double ds,
                                      const RayOptions& opts = {}) {
  if (!is_finite(x0) || !is_finite(xi0)) throw ValidationError("ray start is not finite");
  if (norm(xi0) == 0.0) throw DomainError("degenerate direction: |xi0| = 0");
  if (!(ds > 0.0)) throw ValidationError("ray step ds must be positive");
  if (!(t_max > 0.0)) throw ValidationError("ray t_max must be positive");
  if (!domain.contains(x0)) throw DomainError("ray start lies outside the domain");

  RayPath path;
  path.branch = branch;
  path.t_max = t_max;
  const double tau = field.eval(x0) * norm(xi0);
  PhasePoint cur{x0, branch == Branch::plus ? -xi0 : xi0, 0.0, tau, 0.0};
  path.points.push_back(cur);

  const double nominal = t_max / (tau * ds);
  const std::size_t cap = opts.max_steps ? opts.max_steps : std::size_t(4.0 * std::ceil(nominal)) + 16;

  if (opts.tube) {
    path.clearance = opts.tube->curve.distance(x0) - opts.tube->margin;
    if (opts.tube->contains(x0)) {
      path.verdict = RayVerdict::hit_v;
      path.t_hit = 0.0;
      return path;
    }
  }

  for (std::size_t step = 0;; ++step) {
    if (cur.t >= t_max) {
      path.verdict = RayVerdict::time_exhausted;
      break;
    }
    if (step >= cap) {
      path.verdict = RayVerdict::step_limit;
      break;
    }
    const double h = std::min(ds, (t_max - cur.t) / tau);
    const auto k1 = detail::ray_rhs(field, domain, cur.x, cur.xi);
    const auto k2 = detail::ray_rhs(field, domain, cur.x + 0.5 * h * k1.dx, cur.xi + 0.5 * h * k1.dxi);
    const auto k3 = detail::ray_rhs(field, domain, cur.x + 0.5 * h * k2.dx, cur.xi + 0.5 * h * k2.dxi);
    const auto k4 = detail::ray_rhs(field, domain, cur.x + h * k3.dx, cur.xi + h * k3.dxi);
    PhasePoint next = cur;
    next.x = cur.x + (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    next.xi = cur.xi + (h / 6.0) * (k1.dxi + 2.0 * k2.dxi + 2.0 * k3.dxi + k4.dxi);
    next.s = cur.s + h;
    next.t = (h == ds) ? cur.t + tau * h : t_max;
    if (!is_finite(next.x) || !is_finite(next.xi)) throw NumericalError("ray integration produced non-finite values");

    if (opts.tube) {
      path.clearance = std::min(path.clearance,
                                detail::segment_distance(*opts.tube, cur.x, next.x, 4) - opts.tube->margin);
      if (auto u = detail::segment_entry(*opts.tube, cur.x, next.x)) {
        PhasePoint hit = next;
        hit.x = cur.x + *u * (next.x - cur.x);
        hit.xi = cur.xi + *u * (next.xi - cur.xi);
        hit.t = cur.t + *u * (next.t - cur.t);
        hit.s = cur.s + *u * (next.s - cur.s);
        path.points.push_back(hit);
        path.verdict = RayVerdict::hit_v;
        path.t_hit = hit.t;
        return path;
      }
    }
    if (!domain.contains(next.x)) {
      // The exit point itself is not stored: the speed may be undefined there.
      if (!opts.keep_path) path.points.push_back(cur);
      path.verdict = RayVerdict::escaped_domain;
      return path;
    }
    if (opts.keep_path)
      path.points.push_back(next);
    cur = next;
  }
  if (!opts.keep_path && path.points.size() == 1) path.points.push_back(cur);
  return path;
}

/// Relative deviation max |c(x)|xi| - tau| / tau along a path.
inline double hamiltonian_drift(const SpeedField& field, const RayPath& path) {
  double worst = 0.0;
  for (const auto& p : path.points) {
    const double tau = p.tau;
    worst = std::max(worst, std::abs(field.eval(p.x) * norm(p.xi) - tau) / tau);
  }
  return worst;
}

struct VisibilityVerdict {
  bool visible = false;
  std::optional<double> t_hit;
  std::optional<Branch> which_branch;
  double t_max = 0.0;
  /// Smallest clearance to the tube over both branches (negative when hit).
  double clearance = std::numeric_limits<double>::infinity();
};

/// Whether either branch of the ray through (x, xi) enters the open tube of
/// half-width v_margin around the observation curve by time t_max. |xi| is
/// normalised to 1/c(x) so that tau = 1 and t = s.
inline VisibilityVerdict is_visible(const Scenario& sc, const SpeedField& field, Vec2 x, Vec2 xi,
                                    double t_max, double ds) {
  if (norm(xi) == 0.0) throw DomainError("degenerate direction: |xi| = 0");
  const Vec2 xi_n = (1.0 / (field.eval(x) * norm(xi))) * xi;
  const Tube tube{sc.s_curve, sc.v_margin};
  RayOptions opts;
  opts.keep_path = false;
  opts.tube = &tube;
  VisibilityVerdict out;
  out.t_max = t_max;
  for (Branch b : {Branch::plus, Branch::minus}) {
    const RayPath p = trace_bicharacteristic(field, sc.domain_rect, x, xi_n, b, t_max, ds, opts);
    out.clearance = std::min(out.clearance, p.clearance);
    if (p.t_hit && (!out.t_hit || *p.t_hit < *out.t_hit)) {
      out.visible = true;
      out.t_hit = p.t_hit;
      out.which_branch = b;
    }
  }
  return out;
}

/// Candidate directions theta_j = j pi / n_dir, j = 0..n_dir-1, on the half circle.
inline Vec2 candidate_direction(std::size_t j, std::size_t n_dir) {
  const double th = std::numbers::pi * double(j) / double(n_dir);
  return {std::cos(th), std::sin(th)};
}

struct VisibilityMap {
  std::vector<Vec2> positions;
  std::size_t n_dir = 0;
  /// visible[i * n_dir + j] for position i and direction j.
  std::vector<std::uint8_t> visible;
  double t_max = 0.0;

  bool at(std::size_t i, std::size_t j) const { return visible[i * n_dir + j] != 0; }
  double fraction(std::size_t i) const {
    std::size_t n = 0;
    for (std::size_t j = 0; j < n_dir; ++j) n += visible[i * n_dir + j];
    return double(n) / double(n_dir);
  }
};

/// Visibility of n_dir directions at n_pos positions sampled in Omega.
inline VisibilityMap visibility_map(const Scenario& sc, const SpeedField& field, std::size_t n_pos,
                                    std::size_t n_dir, double t_max, double ds,
                                    std::size_t workers = default_workers()) {
  if (n_pos == 0 || n_dir == 0) throw ValidationError("visibility map needs n_pos, n_dir >= 1");
  VisibilityMap m;
  m.positions = sample_disc(sc.omega, n_pos);
  m.n_dir = n_dir;
  m.t_max = t_max;
  m.visible.assign(n_pos * n_dir, 0);
  parallel_for(
      n_pos * n_dir,
      [&](std::size_t idx) {
        const auto i = idx / n_dir, j = idx % n_dir;
        m.visible[idx] = is_visible(sc, field, m.positions[i], candidate_direction(j, n_dir), t_max, ds).visible;
      },
      workers);
  return m;
}

struct InvisibleSearch {
  std::optional<Vec2> direction;
  std::optional<std::size_t> index;
  /// invisible[j]: direction j is invisible from every sampled point of U.
  std::vector<std::uint8_t> invisible;
  double t_max = 0.0;
};

/// Scans directions invisible from all n_u_samples points of U. Among them,
/// the longest run of consecutive invisible directions (cyclic in j) is
/// located and its middle index returned; ties go to the smallest index.
inline InvisibleSearch find_invisible_direction_scan(const Scenario& sc, const SpeedField& field,
                                                     std::size_t n_u_samples, std::size_t n_dir,
                                                     double t_max, double ds,
                                                     std::size_t workers = default_workers()) {
  if (n_u_samples == 0 || n_dir == 0) throw ValidationError("direction search needs n_u_samples, n_dir >= 1");
  const auto pts = sample_disc(sc.u_region, n_u_samples);
  InvisibleSearch out;
  out.t_max = t_max;
  out.invisible.assign(n_dir, 0);
  parallel_for(
      n_dir,
      [&](std::size_t j) {
        const Vec2 d = candidate_direction(j, n_dir);
        for (const auto& x : pts)
          if (is_visible(sc, field, x, d, t_max, ds).visible) return;
        out.invisible[j] = 1;
      },
      workers);

  const auto n_inv = std::size_t(std::count(out.invisible.begin(), out.invisible.end(), 1));
  if (n_inv == 0) return out;
  if (n_inv == n_dir) {
    out.index = 0;
  } else {
    // Runs may wrap around j = n_dir - 1 -> 0 (theta and theta + pi coincide as lines).
    std::size_t start = 0;
    while (out.invisible[start]) ++start;  // a visible index exists
    std::size_t best_len = 0, best_mid = 0;
    std::size_t run_len = 0, run_begin = 0;
    for (std::size_t q = 1; q <= n_dir; ++q) {
      const std::size_t j = (start + q) % n_dir;
      if (out.invisible[j] && q < n_dir) {
        if (run_len == 0) run_begin = j;
        ++run_len;
        continue;
      }
      if (run_len > 0) {
        const std::size_t mid = (run_begin + (run_len - 1) / 2) % n_dir;
        if (run_len > best_len || (run_len == best_len && mid < best_mid)) {
          best_len = run_len;
          best_mid = mid;
        }
      }
      run_len = 0;
    }
    out.index = best_mid;
  }
  out.direction = candidate_direction(*out.index, n_dir);
  return out;
}

inline std::optional<Vec2> find_invisible_direction(const Scenario& sc, const SpeedField& field,
                                                    std::size_t n_u_samples, std::size_t n_dir,
                                                    double t_max, double ds,
                                                    std::size_t workers = default_workers()) {
  return find_invisible_direction_scan(sc, field, n_u_samples, n_dir, t_max, ds, workers).direction;
}

/// Operational trapping: both branches run until t_max without leaving the
/// annulus r_in < |x - center| < r_out, at step ds and again at ds / 2.
inline bool confirm_trapped(const SpeedField& field, const Rect& domain, Vec2 x0, Vec2 xi0, double t_max,
                            double ds, Vec2 center, double r_in, double r_out) {
  for (double h : {ds, 0.5 * ds}) {
    for (Branch b : {Branch::plus, Branch::minus}) {
      const RayPath p = trace_bicharacteristic(field, domain, x0, xi0, b, t_max, h);
      if (p.verdict != RayVerdict::time_exhausted) return false;
      for (const auto& q : p.points) {
        const double r = norm(q.x - center);
        if (!(r > r_in && r < r_out)) return false;
      }
    }
  }
  return true;
}

/// CSV rows "s,t,x,y,xi_x,xi_y".
inline void write_ray_csv(std::ostream& os, const RayPath& path) {
  CsvWriter w(os, {"s", "t", "x", "y", "xi_x", "xi_y"});
  for (const auto& p : path.points) w.row({p.s, p.t, p.x.x, p.x.y, p.xi.x, p.xi.y});
}

inline void write_ray_csv(const std::filesystem::path& file, const RayPath& path) {
  auto os = open_output(file);
  write_ray_csv(os, path);
}

}  // namespace tat
