#pragma once

#include <cmath>
#include <concepts>
#include <numbers>
#include <vector>

#include "tatlab/errors.hpp"
#include "tatlab/geometry.hpp"
#include "tatlab/grid.hpp"
#include "tatlab/spectral_norms.hpp"

namespace tat {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// A 1D profile with compact support.
template <class P>
concept Profile = requires(const P& p, double x) {
  { p(x) } -> std::convertible_to<double>;
  { p.support() } -> std::same_as<Interval>;
};

/// x -> exp(-1 / (1 - ((x - center) / radius)^2)) inside the support, 0 outside.
struct Bump {
  double center = 0.0;
  double radius = 1.0;

  double operator()(double x) const {
    const double t = (x - center) / radius;
    const double q = 1.0 - t * t;
    return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
  }
  Interval support() const { return {center - radius, center + radius}; }
};

inline Bump make_bump(double center, double radius) {
  if (!(radius > 0.0)) throw ValidationError("bump radius must be positive");
  return {center, radius};
}

/// h_k(x) = bump(x / eps) cos(k pi x / eps) on I = (-eps, eps).
struct Oscillator {
  int k = 0;
  double epsilon = 1.0;

  double operator()(double x) const {
    return Bump{0.0, epsilon}(x) * std::cos(double(k) * std::numbers::pi * x / epsilon);
  }
  Interval support() const { return {-epsilon, epsilon}; }
  /// Carrier frequency k pi / eps.
  double frequency() const { return double(k) * std::numbers::pi / epsilon; }
};

inline Oscillator make_oscillator(int k, double epsilon) {
  if (k < 0) throw ValidationError("oscillator index must be non-negative");
  if (!(epsilon > 0.0)) throw ValidationError("oscillator half-width must be positive");
  return {k, epsilon};
}

/// f(x) = f0(x') h(x_n) with x_n = (x - center) . orientation and
/// x' = (x - center) . perp(orientation). Returns ValidationError if the
/// rotated support box leaves `u_region`.
template <Profile F0, Profile H>
GridField assemble_product(const F0& f0, const H& h, Vec2 orientation, Vec2 center,
                           const GridField& grid, const Disc& u_region) {
  const double len = norm(orientation);
  if (!(len > 0.0)) throw ValidationError("orientation must be non-zero");
  const Vec2 n = orientation * (1.0 / len);
  const Vec2 t = perp(n);
  const Interval a = f0.support(), b = h.support();
  for (double xp : {a.lo, a.hi})
    for (double xn : {b.lo, b.hi})
      if (!u_region.contains(center + xp * t + xn * n))
        throw ValidationError("product support escapes the region U");
  GridField out = grid.zeros_like();
  for (std::size_t j = 0; j < out.ny; ++j) {
    for (std::size_t i = 0; i < out.nx; ++i) {
      const Vec2 d = out.node(i, j) - center;
      const double xn = dot(d, n);
      if (xn <= b.lo || xn >= b.hi) continue;
      const double xp = dot(d, t);
      if (xp <= a.lo || xp >= a.hi) continue;
      out(i, j) = f0(xp) * h(xn);
    }
  }
  return out;
}

/// One member of the invisible family: a bump across the invisible direction
/// times an oscillator along it.
struct ProductFunction {
  Vec2 center;
  double f0_radius = 0.1;
  double epsilon = 0.1;
  int k = 0;
  Vec2 orientation{0.0, 1.0};

  Bump f0() const { return make_bump(0.0, f0_radius); }
  Oscillator h() const { return make_oscillator(k, epsilon); }

  GridField sample(const GridField& grid, const Disc& u_region) const {
    return assemble_product(f0(), h(), orientation, center, grid, u_region);
  }
};

/// Samples a profile on [lo, lo + (n-1) spacing].
template <Profile P>
std::vector<double> sample_profile(const P& p, double lo, double spacing, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = p(lo + double(i) * spacing);
  return v;
}

}  // namespace tat
