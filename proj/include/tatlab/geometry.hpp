#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace tat {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return a -= b; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
constexpr double norm2(Vec2 a) { return dot(a, a); }
/// Counter-clockwise quarter turn.
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 unit_from_degrees(double deg) {
  const double r = deg * std::numbers::pi / 180.0;
  return {std::cos(r), std::sin(r)};
}
inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

struct Rect {
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  bool contains_interior(Vec2 p) const {
    return p.x > x_min && p.x < x_max && p.y > y_min && p.y < y_max;
  }
  Vec2 clamp(Vec2 p) const {
    return {std::clamp(p.x, x_min, x_max), std::clamp(p.y, y_min, y_max)};
  }
};

struct Disc {
  Vec2 center;
  double radius = 0.0;

  bool contains(Vec2 p) const { return norm(p - center) <= radius; }
  /// Closed disc lies strictly inside the rectangle.
  bool inside(const Rect& r) const {
    return center.x - radius > r.x_min && center.x + radius < r.x_max &&
           center.y - radius > r.y_min && center.y + radius < r.y_max;
  }
  bool inside(const Disc& d) const {
    return norm(center - d.center) + radius <= d.radius;
  }
};

/// Deterministic, nearly uniform sample of a disc (Vogel spiral). The first
/// point is the center and the last one lies on the rim.
inline std::vector<Vec2> sample_disc(const Disc& d, std::size_t n) {
  std::vector<Vec2> out;
  out.reserve(n);
  if (n == 1) {
    out.push_back(d.center);
    return out;
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double r = d.radius * std::sqrt(double(i) / double(n - 1));
    const double a = golden * double(i);
    out.push_back(d.center + Vec2{r * std::cos(a), r * std::sin(a)});
  }
  return out;
}

/// Circular arc, angles in degrees measured counter-clockwise from +x.
/// A span of 360 degrees or more is a closed circle.
struct Arc {
  Vec2 center;
  double radius = 0.0;
  double start_deg = 0.0;
  double end_deg = 360.0;

  double span_deg() const { return std::min(end_deg - start_deg, 360.0); }
  bool closed() const { return end_deg - start_deg >= 360.0 - 1e-9; }
  double length() const { return radius * span_deg() * std::numbers::pi / 180.0; }

  Vec2 at_degrees(double deg) const { return center + radius * unit_from_degrees(deg); }

  /// Parameter of sample i out of n. Closed circles do not repeat the start point.
  double sample_degrees(std::size_t i, std::size_t n) const {
    const double step = closed() ? 360.0 / double(n) : span_deg() / double(n - 1);
    return start_deg + step * double(i);
  }

  std::vector<Vec2> sample(std::size_t n) const {
    std::vector<Vec2> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = at_degrees(sample_degrees(i, n));
    return pts;
  }

  /// Spacing between consecutive samples (arclength).
  double sample_spacing(std::size_t n) const {
    return closed() ? length() / double(n) : length() / double(n - 1);
  }

  /// Trapezoidal arclength weights; uniform for a closed circle.
  std::vector<double> arclength_weights(std::size_t n) const {
    std::vector<double> w(n, sample_spacing(n));
    if (!closed()) {
      w.front() *= 0.5;
      w.back() *= 0.5;
    }
    return w;
  }

  /// Offset of `deg` past start_deg, wrapped into [0, 360).
  double offset_degrees(double deg) const {
    double off = std::fmod(deg - start_deg, 360.0);
    if (off < 0.0) off += 360.0;
    return off;
  }

  bool covers_degrees(double deg) const {
    return closed() || offset_degrees(deg) <= span_deg();
  }

  double distance(Vec2 p) const {
    const Vec2 d = p - center;
    const double r = norm(d);
    if (r == 0.0) return radius;
    const double deg = std::atan2(d.y, d.x) * 180.0 / std::numbers::pi;
    if (covers_degrees(deg)) return std::abs(r - radius);
    return std::min(norm(p - at_degrees(start_deg)), norm(p - at_degrees(end_deg)));
  }
};

}  // namespace tat
