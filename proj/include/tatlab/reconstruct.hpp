#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "tatlab/csv.hpp"
#include "tatlab/errors.hpp"
#include "tatlab/grid.hpp"
#include "tatlab/spectral_norms.hpp"
#include "tatlab/wavesim.hpp"

namespace tat {

struct ReconstructionResult {
  GridField f_rec;
  std::optional<double> rel_l2_error;  ///< against ground truth, over omega
  std::size_t iterations = 0;
  std::vector<double> residual_history;  ///< ||g - T f_i||, i = 0..iterations
  double step = 0.0;
};

/// ||a - b|| / ||b|| over the nodes inside omega.
inline double relative_error(const GridField& a, const GridField& b, const Disc& omega) {
  if (!a.same_geometry(b)) throw ValidationError("fields live on different grids");
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < a.ny; ++j)
    for (std::size_t i = 0; i < a.nx; ++i) {
      if (!omega.contains(a.node(i, j))) continue;
      const double d = a(i, j) - b(i, j);
      num += d * d;
      den += b(i, j) * b(i, j);
    }
  if (!(den > 0.0)) throw ValidationError("relative error against a zero field");
  return std::sqrt(num / den);
}

/// Time-reversal reconstruction of f from its trace, restricted to omega.
inline GridField time_reversal(const WavePropagator& prop, const TraceRecord& g) {
  return prop.time_reversal(g);
}

inline TraceRecord residual(const TraceRecord& g, const TraceRecord& tf) {
  TraceRecord r = g;
  for (std::size_t k = 0; k < r.values.size(); ++k) r.values[k] -= tf.values[k];
  return r;
}

/// Estimate of ||T||^2 by power iteration on T*T from a fixed pseudo-random
/// start supported in omega.
inline double estimate_operator_norm2(const WavePropagator& prop, std::size_t iterations = 20,
                                      std::uint64_t seed = 12345) {
  GridField v = prop.physical_zeros();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (auto& x : v.values) x = normal(rng);
  mask_outside(v, prop.scenario().omega);
  double lambda = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    const double nv = l2_norm(v);
    if (!(nv > 0.0)) return 0.0;
    for (auto& x : v.values) x /= nv;
    GridField w = prop.adjoint(prop.forward(v));
    lambda = inner(v, w);
    v = std::move(w);
  }
  return lambda;
}

/// Landweber iteration f <- f + step T*(g - T f) from f = 0. Throws
/// DivergenceError when the residual grows on 3 consecutive iterations.
/// `observer(i, f_i)` is called after every update when provided.
inline ReconstructionResult landweber(const WavePropagator& prop, const TraceRecord& g, std::size_t n_iter,
                                      double step, const GridField* truth = nullptr,
                                      const std::function<void(std::size_t, const GridField&)>& observer = {}) {
  if (n_iter < 1) throw ValidationError("Landweber needs at least one iteration");
  if (!(step > 0.0)) throw ValidationError("Landweber step must be positive");
  ReconstructionResult out;
  out.step = step;
  out.f_rec = prop.physical_zeros();
  TraceRecord r = g;
  out.residual_history.push_back(l2_norm(r));
  int rising = 0;
  for (std::size_t it = 1; it <= n_iter; ++it) {
    const GridField update = prop.adjoint(r);
    axpy(step, update, out.f_rec);
    r = residual(g, prop.forward(out.f_rec));
    const double res = l2_norm(r);
    rising = res > out.residual_history.back() ? rising + 1 : 0;
    out.residual_history.push_back(res);
    out.iterations = it;
    if (observer) observer(it, out.f_rec);
    if (rising >= 3)
      throw DivergenceError(step, "Landweber diverged: residual grew on 3 consecutive iterations with step " +
                                      format_double(step));
  }
  if (truth) out.rel_l2_error = relative_error(out.f_rec, *truth, prop.scenario().omega);
  return out;
}

/// Share of the Fourier energy of err within half_angle of +-direction.
inline double cone_residual_energy(const GridField& err, Vec2 direction, double half_angle_deg) {
  return cone_energy_fraction(err, direction, half_angle_deg);
}

/// CSV rows "iter,residual".
inline void write_residual_csv(std::ostream& os, const std::vector<double>& history) {
  CsvWriter w(os, {"iter", "residual"});
  for (std::size_t i = 0; i < history.size(); ++i) w.row({double(i), history[i]});
}

}  // namespace tat
