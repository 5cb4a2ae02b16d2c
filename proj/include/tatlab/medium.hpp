#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tatlab/config.hpp"
#include "tatlab/errors.hpp"
#include "tatlab/geometry.hpp"
#include "tatlab/grid.hpp"
#include "tatlab/grid_io.hpp"

namespace tat {

enum class SpeedKind { constant, linear_gradient, gaussian_waveguide, radial_bump, gridded };

inline const char* to_string(SpeedKind k) {
  switch (k) {
    case SpeedKind::constant: return "constant";
    case SpeedKind::linear_gradient: return "linear_gradient";
    case SpeedKind::gaussian_waveguide: return "gaussian_waveguide";
    case SpeedKind::radial_bump: return "radial_bump";
    case SpeedKind::gridded: return "gridded";
  }
  return "?";
}

/// Sound speed c(x) with bounds 0 < c_min <= c <= c_max and the gradient of c^2.
///
/// Analytic kinds:
///   constant            c
///   linear_gradient     c = a + b y                       (bounds taken over a support rectangle)
///   gaussian_waveguide  c = 1 - a exp(-(r - r0)^2 / s^2)  (low-speed ring channel, 0 < a < 1)
///   radial_bump         c = c0 + A exp(-|x - x0|^2 / s^2) (A > 0, defocusing)
/// The gridded kind interpolates node values bilinearly; its grad(c^2) is the
/// bilinear interpolant of nodal central differences.
///
/// Immutable once built, so concurrent evaluation is safe.
class SpeedField {
 public:
  static SpeedField constant(double c) {
    if (!(c > 0.0)) throw ValidationError("constant speed must be positive");
    return SpeedField(SpeedKind::constant, {c}, c, c, Constant{c});
  }

  static SpeedField linear_gradient(double a, double b, const Rect& support) {
    const double lo = a + b * (b >= 0 ? support.y_min : support.y_max);
    const double hi = a + b * (b >= 0 ? support.y_max : support.y_min);
    if (!(lo > 0.0))
      throw ValidationError("linear_gradient speed must stay positive over the domain");
    return SpeedField(SpeedKind::linear_gradient, {a, b}, lo, hi, Linear{a, b});
  }

  static SpeedField gaussian_waveguide(double a, double r0, double sigma) {
    if (!(a > 0.0 && a < 1.0)) throw ValidationError("gaussian_waveguide needs 0 < a < 1");
    if (!(sigma > 0.0)) throw ValidationError("gaussian_waveguide needs sigma > 0");
    return SpeedField(SpeedKind::gaussian_waveguide, {a, r0, sigma}, 1.0 - a, 1.0,
                      Waveguide{a, r0, sigma});
  }

  static SpeedField radial_bump(double base, double amplitude, Vec2 center, double sigma) {
    if (!(base > 0.0) || !(amplitude >= 0.0) || !(sigma > 0.0))
      throw ValidationError("radial_bump needs base > 0, amplitude >= 0, sigma > 0");
    return SpeedField(SpeedKind::radial_bump, {base, amplitude, center.x, center.y, sigma}, base,
                      base + amplitude, Bump{base, amplitude, center, sigma});
  }

  static SpeedField gridded(GridField c) {
    if (c.nx < 3 || c.ny < 3) throw ValidationError("gridded speed needs at least 3x3 nodes");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double v : c.values) {
      if (!std::isfinite(v) || !(v > 0.0))
        throw ValidationError("gridded speed values must be finite and positive");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    Gridded g{c, c.zeros_like(), c.zeros_like()};
    const double h = c.h;
    auto c2 = [&](std::size_t i, std::size_t j) { return c(i, j) * c(i, j); };
    for (std::size_t j = 0; j < c.ny; ++j) {
      for (std::size_t i = 0; i < c.nx; ++i) {
        const std::size_t il = i == 0 ? 0 : i - 1, ir = i + 1 == c.nx ? i : i + 1;
        const std::size_t jl = j == 0 ? 0 : j - 1, jr = j + 1 == c.ny ? j : j + 1;
        g.dc2x(i, j) = (c2(ir, j) - c2(il, j)) / (double(ir - il) * h);
        g.dc2y(i, j) = (c2(i, jr) - c2(i, jl)) / (double(jr - jl) * h);
      }
    }
    return SpeedField(SpeedKind::gridded, {}, lo, hi, std::move(g));
  }

  SpeedKind kind() const { return kind_; }
  std::span<const double> params() const { return params_; }
  double c_min() const { return c_min_; }
  double c_max() const { return c_max_; }

  double operator()(Vec2 x) const { return eval(x); }

  double eval(Vec2 x) const {
    const double c = std::visit([&](const auto& m) { return value(m, x); }, model_);
    const double slack = 1e-12 * c_max_;
    if (!(c >= c_min_ - slack && c <= c_max_ + slack))
      throw InvariantError("speed " + std::to_string(c) + " outside [" + std::to_string(c_min_) +
                           ", " + std::to_string(c_max_) + "] at (" + std::to_string(x.x) +
                           ", " + std::to_string(x.y) + ")");
    return c;
  }

  /// grad(c^2)(x).
  Vec2 grad_c2(Vec2 x) const {
    return std::visit([&](const auto& m) { return gradient(m, x); }, model_);
  }

 private:
  struct Constant { double c; };
  struct Linear { double a, b; };
  struct Waveguide { double a, r0, sigma; };
  struct Bump { double base, amplitude; Vec2 center; double sigma; };
  struct Gridded { GridField c, dc2x, dc2y; };
  using Model = std::variant<Constant, Linear, Waveguide, Bump, Gridded>;

  SpeedField(SpeedKind k, std::vector<double> p, double lo, double hi, Model m)
      : kind_(k), params_(std::move(p)), c_min_(lo), c_max_(hi), model_(std::move(m)) {}

  static double value(const Constant& m, Vec2) { return m.c; }
  static double value(const Linear& m, Vec2 x) { return m.a + m.b * x.y; }
  static double value(const Waveguide& m, Vec2 x) {
    const double d = (norm(x) - m.r0) / m.sigma;
    return 1.0 - m.a * std::exp(-d * d);
  }
  static double value(const Bump& m, Vec2 x) {
    return m.base + m.amplitude * std::exp(-norm2(x - m.center) / (m.sigma * m.sigma));
  }
  static double value(const Gridded& m, Vec2 x) { return m.c.interpolate(x); }

  static Vec2 gradient(const Constant&, Vec2) { return {}; }
  static Vec2 gradient(const Linear& m, Vec2 x) { return {0.0, 2.0 * value(m, x) * m.b}; }
  static Vec2 gradient(const Waveguide& m, Vec2 x) {
    const double r = norm(x);
    if (r == 0.0) return {};
    const double d = (r - m.r0) / m.sigma;
    const double e = std::exp(-d * d);
    const double dc_dr = m.a * e * 2.0 * d / m.sigma;
    return (2.0 * (1.0 - m.a * e) * dc_dr / r) * x;
  }
  static Vec2 gradient(const Bump& m, Vec2 x) {
    const Vec2 d = x - m.center;
    const double s2 = m.sigma * m.sigma;
    const double e = m.amplitude * std::exp(-norm2(d) / s2);
    return (2.0 * (m.base + e) * (-2.0 * e / s2)) * d;
  }
  static Vec2 gradient(const Gridded& m, Vec2 x) {
    return {m.dc2x.interpolate(x), m.dc2y.interpolate(x)};
  }

  SpeedKind kind_;
  std::vector<double> params_;
  double c_min_, c_max_;
  Model model_;
};

inline double eval_speed(const SpeedField& f, Vec2 x) {
  if (!is_finite(x)) throw ValidationError("speed evaluated at a non-finite point");
  return f.eval(x);
}

inline Vec2 grad_c2(const SpeedField& f, Vec2 x) {
  if (!is_finite(x)) throw ValidationError("gradient evaluated at a non-finite point");
  return f.grad_c2(x);
}

/// Region of interest, observation arc and time window.
struct Scenario {
  Rect domain_rect;
  Disc omega;
  Arc s_curve;
  std::size_t n_s = 128;
  double v_margin = 0.05;  ///< half-width of the tube V around S
  Disc u_region;
  double t_obs = 1.0;
  std::size_t n_t = 2;

  /// Throws ValidationError naming the first broken invariant.
  void validate() const {
    if (!(domain_rect.width() > 0.0 && domain_rect.height() > 0.0))
      throw ValidationError("domain rectangle is empty");
    if (!(omega.radius > 0.0)) throw ValidationError("omega radius must be positive");
    if (!omega.inside(domain_rect))
      throw ValidationError("closure of omega must lie inside the domain rectangle");
    if (!(u_region.radius > 0.0)) throw ValidationError("u_region radius must be positive");
    if (!u_region.inside(omega)) throw ValidationError("u_region must lie inside omega");
    if (!(s_curve.radius > 0.0)) throw ValidationError("observation arc radius must be positive");
    if (!(s_curve.end_deg > s_curve.start_deg))
      throw ValidationError("observation arc needs angle_end > angle_start");
    if (n_s < 2) throw ValidationError("n_s must be at least 2");
    if (n_t < 2) throw ValidationError("n_t must be at least 2");
    if (!(t_obs > 0.0)) throw ValidationError("t_obs must be positive");
    if (!(v_margin > 0.0)) throw ValidationError("v_margin must be positive");
    // Fine sample of S for the containment check.
    for (const Vec2& p : s_curve.sample(std::max<std::size_t>(n_s, 720)))
      if (!domain_rect.contains_interior(p))
        throw ValidationError("observation arc leaves the domain rectangle");
  }

  std::vector<Vec2> s_points() const { return s_curve.sample(n_s); }
};

inline Scenario build_scenario(const Config& cfg) {
  Scenario sc;
  sc.domain_rect = {cfg.get_double("scenario.domain_x_min"), cfg.get_double("scenario.domain_x_max"),
                    cfg.get_double("scenario.domain_y_min"), cfg.get_double("scenario.domain_y_max")};
  sc.omega = {{cfg.get_double("scenario.omega_x", 0.0), cfg.get_double("scenario.omega_y", 0.0)},
              cfg.get_double("scenario.omega_radius")};
  sc.s_curve = {{cfg.get_double("scenario.s_x", 0.0), cfg.get_double("scenario.s_y", 0.0)},
                cfg.get_double("scenario.s_radius"),
                cfg.get_double("scenario.s_angle_start", 0.0),
                cfg.get_double("scenario.s_angle_end", 360.0)};
  const auto n_s = cfg.get_int("scenario.n_s", 128);
  const auto n_t = cfg.get_int("scenario.n_t", 2);
  if (n_s < 2) throw ConfigError("scenario.n_s", "scenario.n_s must be at least 2");
  if (n_t < 2) throw ConfigError("scenario.n_t", "scenario.n_t must be at least 2");
  sc.n_s = std::size_t(n_s);
  sc.n_t = std::size_t(n_t);
  sc.v_margin = cfg.get_double("scenario.v_margin");
  sc.u_region = {{cfg.get_double("scenario.u_x", 0.0), cfg.get_double("scenario.u_y", 0.0)},
                 cfg.get_double("scenario.u_radius")};
  sc.t_obs = cfg.get_double("scenario.t_obs");
  sc.validate();
  return sc;
}

inline SpeedField build_speed(const Config& cfg, const Rect& domain) {
  const std::string kind = cfg.get_string("medium.kind");
  if (kind == "constant") return SpeedField::constant(cfg.get_double("medium.c", 1.0));
  if (kind == "linear_gradient")
    return SpeedField::linear_gradient(cfg.get_double("medium.a"), cfg.get_double("medium.b"), domain);
  if (kind == "gaussian_waveguide")
    return SpeedField::gaussian_waveguide(cfg.get_double("medium.a"), cfg.get_double("medium.r0"),
                                          cfg.get_double("medium.sigma"));
  if (kind == "radial_bump")
    return SpeedField::radial_bump(
        cfg.get_double("medium.c", 1.0), cfg.get_double("medium.amplitude"),
        {cfg.get_double("medium.center_x", 0.0), cfg.get_double("medium.center_y", 0.0)},
        cfg.get_double("medium.sigma"));
  if (kind == "gridded") return SpeedField::gridded(read_grid(cfg.get_string("medium.path")));
  throw ConfigError("medium.kind", "unknown medium.kind '" + kind + "'");
}

}  // namespace tat
