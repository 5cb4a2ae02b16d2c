#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "tatlab/errors.hpp"
#include "tatlab/fft.hpp"
#include "tatlab/geometry.hpp"
#include "tatlab/grid.hpp"

namespace tat {

/// How samples are continued beyond the sampled window before the DFT.
enum class Extension {
  zero_padded,  ///< compactly supported data, padded with zeros
  periodic,     ///< the window is one period
};

inline constexpr std::size_t kSobolevPad = 4;

namespace detail {

inline std::size_t padded_length(std::size_t n, Extension e, std::size_t pad) {
  return e == Extension::periodic ? n : n * pad;
}

}  // namespace detail

/// H^s norm of a uniformly sampled 2D function via Fourier weights
/// (1 + |omega|^2)^(s/2). `values` holds n_slow rows of n_fast samples.
inline double sobolev_norm_2d(std::span<const double> values, std::size_t n_slow,
                              std::size_t n_fast, double spacing_slow, double spacing_fast,
                              double s, Extension ext_slow = Extension::zero_padded,
                              Extension ext_fast = Extension::zero_padded,
                              std::size_t pad = kSobolevPad) {
  if (s < 0.0) throw ValidationError("Sobolev order must be non-negative");
  if (values.size() != n_slow * n_fast || values.empty())
    throw ValidationError("sample count does not match the stated shape");
  const std::size_t ms = detail::padded_length(n_slow, ext_slow, pad);
  const std::size_t mf = detail::padded_length(n_fast, ext_fast, pad);
  std::vector<fft::cplx> data(ms * mf, 0.0);
  for (std::size_t a = 0; a < n_slow; ++a)
    for (std::size_t b = 0; b < n_fast; ++b) data[a * mf + b] = values[a * n_fast + b];
  fft::dft2(data, mf, ms, fft::Direction::forward);
  std::vector<double> wf(mf);
  for (std::size_t b = 0; b < mf; ++b) {
    const double w = fft::angular_frequency(b, mf, spacing_fast);
    wf[b] = w * w;
  }
  double sum = 0.0;
  for (std::size_t a = 0; a < ms; ++a) {
    const double ws = fft::angular_frequency(a, ms, spacing_slow);
    const double ws2 = ws * ws;
    for (std::size_t b = 0; b < mf; ++b) {
      const double weight = s == 0.0 ? 1.0 : std::pow(1.0 + ws2 + wf[b], s);
      sum += weight * std::norm(data[a * mf + b]);
    }
  }
  return std::sqrt(sum * spacing_slow * spacing_fast / double(ms * mf));
}

/// H^s norm of uniformly spaced 1D samples.
inline double sobolev_norm(std::span<const double> samples, double spacing, double s,
                           Extension ext = Extension::zero_padded, std::size_t pad = kSobolevPad) {
  if (s < 0.0) throw ValidationError("Sobolev order must be non-negative");
  if (samples.empty()) throw ValidationError("no samples");
  const std::size_t m = detail::padded_length(samples.size(), ext, pad);
  std::vector<fft::cplx> data(m, 0.0);
  std::copy(samples.begin(), samples.end(), data.begin());
  fft::dft1(data, fft::Direction::forward);
  double sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double w = fft::angular_frequency(k, m, spacing);
    sum += std::pow(1.0 + w * w, s) * std::norm(data[k]);
  }
  return std::sqrt(sum * spacing / double(m));
}

/// H^s norm of a grid function (rows are y).
inline double sobolev_norm(const GridField& f, double s, Extension ext = Extension::zero_padded,
                           std::size_t pad = kSobolevPad) {
  return sobolev_norm_2d(f.values, f.ny, f.nx, f.h, f.h, s, ext, ext, pad);
}

/// Share of the 2D Fourier energy of `f` whose wave vector lies within
/// `half_angle_deg` of +direction or -direction. The zero frequency carries no
/// direction and is left out of both numerator and denominator.
inline double cone_energy_fraction(const GridField& f, Vec2 direction, double half_angle_deg,
                                   std::size_t pad = 2) {
  if (!(half_angle_deg > 0.0 && half_angle_deg < 90.0))
    throw ValidationError("cone half-angle must lie in (0, 90) degrees");
  const double len = norm(direction);
  if (!(len > 0.0)) throw ValidationError("cone direction must be non-zero");
  const Vec2 d = direction * (1.0 / len);
  const double cos_half = std::cos(half_angle_deg * std::numbers::pi / 180.0);
  const std::size_t mx = f.nx * pad, my = f.ny * pad;
  std::vector<fft::cplx> data(mx * my, 0.0);
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i) data[j * mx + i] = f(i, j);
  fft::dft2(data, mx, my, fft::Direction::forward);
  double inside = 0.0, total = 0.0;
  for (std::size_t j = 0; j < my; ++j) {
    const double ky = fft::angular_frequency(j, my, f.h);
    for (std::size_t i = 0; i < mx; ++i) {
      if (i == 0 && j == 0) continue;
      const double kx = fft::angular_frequency(i, mx, f.h);
      const double e = std::norm(data[j * mx + i]);
      total += e;
      if (std::abs(kx * d.x + ky * d.y) >= cos_half * std::hypot(kx, ky)) inside += e;
    }
  }
  if (!(total > 0.0)) throw ValidationError("cone fraction of a zero field is undefined");
  return inside / total;
}

}  // namespace tat
