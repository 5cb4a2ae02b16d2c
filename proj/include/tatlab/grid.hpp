#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "tatlab/errors.hpp"
#include "tatlab/geometry.hpp"

namespace tat {

/// Uniform 2D sample grid. Node (i, j) sits at origin + (i h, j h) and is
/// stored at values[j * nx + i] (row-major, x fastest).
struct GridField {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double h = 1.0;
  Vec2 origin;
  std::vector<double> values;

  GridField() = default;
  GridField(std::size_t nx_, std::size_t ny_, double h_, Vec2 origin_, double fill = 0.0)
      : nx(nx_), ny(ny_), h(h_), origin(origin_), values(nx_ * ny_, fill) {
    if (!(h_ > 0.0)) throw ValidationError("grid spacing must be positive");
  }

  std::size_t size() const { return values.size(); }
  double& operator()(std::size_t i, std::size_t j) { return values[j * nx + i]; }
  double operator()(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
  Vec2 node(std::size_t i, std::size_t j) const {
    return origin + Vec2{double(i) * h, double(j) * h};
  }
  Vec2 far_corner() const { return node(nx - 1, ny - 1); }
  Rect extent() const { return {origin.x, far_corner().x, origin.y, far_corner().y}; }

  bool same_geometry(const GridField& o) const {
    return nx == o.nx && ny == o.ny && h == o.h && origin == o.origin;
  }

  /// Returns a zero field on the same grid.
  GridField zeros_like() const { return GridField(nx, ny, h, origin); }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }

  /// Bilinear interpolation; throws DomainError outside the sampled rectangle.
  double interpolate(Vec2 p) const {
    const double fx = (p.x - origin.x) / h;
    const double fy = (p.y - origin.y) / h;
    const double eps = 1e-9;
    if (fx < -eps || fy < -eps || fx > double(nx - 1) + eps || fy > double(ny - 1) + eps)
      throw DomainError("point outside gridded support");
    const auto i = std::min<std::size_t>(std::size_t(std::max(0.0, std::floor(fx))), nx - 2);
    const auto j = std::min<std::size_t>(std::size_t(std::max(0.0, std::floor(fy))), ny - 2);
    const double tx = std::clamp(fx - double(i), 0.0, 1.0);
    const double ty = std::clamp(fy - double(j), 0.0, 1.0);
    return (1 - tx) * (1 - ty) * (*this)(i, j) + tx * (1 - ty) * (*this)(i + 1, j) +
           (1 - tx) * ty * (*this)(i, j + 1) + tx * ty * (*this)(i + 1, j + 1);
  }
};

/// Discrete L2 inner product h^2 sum a b.
inline double inner(const GridField& a, const GridField& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a.values[k] * b.values[k];
  return s * a.h * a.h;
}

inline double l2_norm(const GridField& a) { return std::sqrt(inner(a, a)); }

/// a += s * b
inline void axpy(double s, const GridField& b, GridField& a) {
  for (std::size_t k = 0; k < a.size(); ++k) a.values[k] += s * b.values[k];
}

/// Zeroes every node outside the disc.
inline void mask_outside(GridField& f, const Disc& d) {
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i)
      if (!d.contains(f.node(i, j))) f(i, j) = 0.0;
}

/// Grid of spacing h whose nodes span `r` (the far edge is rounded to the
/// nearest whole cell).
inline GridField grid_covering(const Rect& r, double h) {
  const auto nx = std::size_t(std::llround(r.width() / h)) + 1;
  const auto ny = std::size_t(std::llround(r.height() / h)) + 1;
  return GridField(nx, ny, h, {r.x_min, r.y_min});
}

}  // namespace tat
