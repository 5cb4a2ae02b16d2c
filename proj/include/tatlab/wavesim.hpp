#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "tatlab/errors.hpp"
#include "tatlab/fft.hpp"
#include "tatlab/grid.hpp"
#include "tatlab/medium.hpp"

namespace tat {

enum class Boundary { sponge, periodic };

/// Damping layer p_tt + sigma(x) p_t = c^2 lap p wrapped around the physical grid.
/// sigma grows as sigma_max (d / width)^exponent with d the distance in cells
/// from the physical rectangle, so it vanishes on and inside that rectangle.
inline constexpr std::size_t kDefaultSpongeWidth = 80;

struct SpongeLayer {
  std::size_t width = kDefaultSpongeWidth;
  double sigma_max = 0.0;  ///< 1/time; 0 picks sigma_max from c_max, h and width
  double exponent = 2.0;
};

struct SolverOptions {
  double cfl = 0.5;
  std::optional<double> dt;  ///< explicit step; otherwise the largest step allowed by cfl
  Boundary boundary = Boundary::sponge;
  SpongeLayer sponge;
  std::size_t snapshots_every = 0;  ///< 0 disables snapshots
  bool track_energy = false;
  bool check_support = true;  ///< reject initial data with mass outside omega
};

inline constexpr double kMaxCfl = 0.7071067811865476;  // 1/sqrt(2), 2D leapfrog limit

/// Samples g(y_i, t_j) on the observation arc. values[i * n_t + j].
struct TraceRecord {
  std::size_t n_s = 0;
  std::size_t n_t = 0;
  std::vector<double> values;
  std::vector<double> arclengths;  ///< quadrature weight per arc point
  double arc_spacing = 0.0;        ///< distance between consecutive arc samples
  bool closed = false;             ///< arc is a full circle (periodic in arclength)
  double dt_trace = 0.0;
  double t_obs = 0.0;

  double& operator()(std::size_t i, std::size_t j) { return values[i * n_t + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * n_t + j]; }

  /// Trapezoidal weight of time sample j.
  double time_weight(std::size_t j) const {
    return (j == 0 || j + 1 == n_t) ? 0.5 * dt_trace : dt_trace;
  }

  TraceRecord zeros_like() const {
    TraceRecord r = *this;
    std::fill(r.values.begin(), r.values.end(), 0.0);
    return r;
  }

  bool same_sampling(const TraceRecord& o) const {
    return n_s == o.n_s && n_t == o.n_t && dt_trace == o.dt_trace;
  }
};

/// Quadrature inner product on Gamma = S x [0, T].
inline double inner(const TraceRecord& a, const TraceRecord& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.n_s; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < a.n_t; ++j) row += a.time_weight(j) * a(i, j) * b(i, j);
    s += a.arclengths[i] * row;
  }
  return s;
}

inline double l2_norm(const TraceRecord& a) { return std::sqrt(inner(a, a)); }

/// Discrete energy ||u_t / c||^2 + ||grad u||^2 with u_t = p, forward differences
/// and zero values beyond the grid edge.
inline double discrete_energy(const GridField& p, const GridField& u, const GridField& c) {
  double kinetic = 0.0, strain = 0.0;
  for (std::size_t j = 0; j < p.ny; ++j) {
    for (std::size_t i = 0; i < p.nx; ++i) {
      const double v = p(i, j) / c(i, j);
      kinetic += v * v;
      const double here = u(i, j);
      const double dx = (i + 1 < p.nx ? u(i + 1, j) : 0.0) - here;
      const double dy = (j + 1 < p.ny ? u(i, j + 1) : 0.0) - here;
      strain += dx * dx + dy * dy;
      if (i == 0) strain += here * here;
      if (j == 0) strain += here * here;
    }
  }
  return kinetic * p.h * p.h + strain;
}

/// Pressure at two consecutive time levels.
struct WaveState {
  GridField p_curr;
  GridField p_prev;
  std::size_t step = 0;
  double t = 0.0;
  double dt = 0.0;
};

struct SimulationResult {
  TraceRecord trace;
  std::vector<GridField> snapshots;  ///< physical region only
  std::vector<double> snapshot_times;
  std::vector<double> times;     ///< one entry per time level
  std::vector<double> energy;    ///< filled when track_energy is set
  std::vector<double> l2_norms;  ///< ||p(., t)|| over the physical region
};

/// Second-order leapfrog solver for p_tt = c^2 lap p on the physical grid plus
/// an optional sponge, with the trace on the observation arc. Holds only
/// precomputed coefficients, so one instance can serve concurrent solves.
class WavePropagator {
 public:
  WavePropagator(const SpeedField& field, const Scenario& scenario, const GridField& physical,
                 SolverOptions opts = {})
      : scenario_(scenario), opts_(opts) {
    if (!(opts.cfl > 0.0) || opts.cfl > kMaxCfl)
      throw ConfigError("solver.cfl", "solver.cfl must lie in (0, 1/sqrt(2)]");
    nx_ = physical.nx;
    ny_ = physical.ny;
    h_ = physical.h;
    origin_ = physical.origin;
    if (nx_ < 3 || ny_ < 3) throw ValidationError("grid needs at least 3x3 nodes");

    const Rect ext = physical.extent();
    if (opts.boundary == Boundary::sponge) {
      const double tol = 0.5 * h_;
      const Rect& d = scenario.domain_rect;
      if (ext.x_min > d.x_min + tol || ext.x_max < d.x_max - tol || ext.y_min > d.y_min + tol ||
          ext.y_max < d.y_max - tol)
        throw ValidationError("grid does not cover the domain rectangle");
      pad_ = opts.sponge.width;
    }
    NX_ = nx_ + 2 * pad_;
    NY_ = ny_ + 2 * pad_;

    const double limit = kMaxCfl * h_ / field.c_max();
    const double preferred = opts.cfl * h_ / field.c_max();
    if (opts.dt) {
      if (!(*opts.dt > 0.0) || *opts.dt > limit * (1.0 + 1e-12))
        throw ConfigError("solver.dt", "solver.dt violates the CFL limit " + std::to_string(limit));
      n_steps_ = std::size_t(std::ceil(scenario.t_obs / *opts.dt - 1e-9));
    } else {
      n_steps_ = std::size_t(std::ceil(scenario.t_obs / preferred - 1e-9));
    }
    n_steps_ = std::max(n_steps_, scenario.n_t - 1);
    dt_ = scenario.t_obs / double(n_steps_);

    const GridField ext_grid(NX_, NY_, h_, origin_ - Vec2{double(pad_) * h_, double(pad_) * h_});
    speed_ = ext_grid;
    coef_.assign(NX_ * NY_, 0.0);
    damp_a_.assign(NX_ * NY_, 1.0);
    damp_b_.assign(NX_ * NY_, 1.0);
    double sigma_max = opts.sponge.sigma_max;
    if (pad_ > 0 && sigma_max <= 0.0)
      sigma_max = 0.6 * field.c_max() / h_ * 40.0 / double(pad_);  // integral of sigma stays 8 c_max
    for (std::size_t j = 0; j < NY_; ++j) {
      for (std::size_t i = 0; i < NX_; ++i) {
        const Vec2 x = ext.clamp(ext_grid.node(i, j));
        const double c = field.eval(x);
        speed_(i, j) = c;
        const std::size_t k = j * NX_ + i;
        coef_[k] = (c * dt_ / h_) * (c * dt_ / h_);
        if (pad_ > 0) {
          const double dx = double(std::max({std::ptrdiff_t(0), std::ptrdiff_t(pad_) - std::ptrdiff_t(i),
                                             std::ptrdiff_t(i) - std::ptrdiff_t(pad_ + nx_ - 1)}));
          const double dy = double(std::max({std::ptrdiff_t(0), std::ptrdiff_t(pad_) - std::ptrdiff_t(j),
                                             std::ptrdiff_t(j) - std::ptrdiff_t(pad_ + ny_ - 1)}));
          const double d = std::max(dx, dy) / double(pad_);
          const double sigma = sigma_max * std::pow(d, opts.sponge.exponent);
          const double half = 0.5 * sigma * dt_;
          damp_a_[k] = 1.0 / (1.0 + half);
          damp_b_[k] = (1.0 - half) / (1.0 + half);
        }
      }
    }

    // Bilinear sampling stencil of every arc point.
    const auto pts = scenario.s_points();
    sampler_.resize(pts.size());
    for (std::size_t s = 0; s < pts.size(); ++s) {
      const double fx = (pts[s].x - ext_grid.origin.x) / h_;
      const double fy = (pts[s].y - ext_grid.origin.y) / h_;
      if (fx < 0 || fy < 0 || fx > double(NX_ - 1) || fy > double(NY_ - 1))
        throw ValidationError("observation arc leaves the computational grid");
      const auto i = std::min<std::size_t>(std::size_t(fx), NX_ - 2);
      const auto j = std::min<std::size_t>(std::size_t(fy), NY_ - 2);
      const double tx = fx - double(i), ty = fy - double(j);
      auto& st = sampler_[s];
      st.index = {j * NX_ + i, j * NX_ + i + 1, (j + 1) * NX_ + i, (j + 1) * NX_ + i + 1};
      st.weight = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
    }
    arclengths_ = scenario.s_curve.arclength_weights(scenario.n_s);
  }

  double dt() const { return dt_; }
  std::size_t n_steps() const { return n_steps_; }
  std::size_t n_t() const { return n_steps_ + 1; }
  std::size_t pad() const { return pad_; }
  const Scenario& scenario() const { return scenario_; }
  const SolverOptions& options() const { return opts_; }

  /// Zero field on the physical grid.
  GridField physical_zeros() const { return GridField(nx_, ny_, h_, origin_); }

  /// Speed sampled on the computational grid (physical region plus sponge).
  const GridField& speed_samples() const { return speed_; }

  TraceRecord empty_trace() const {
    TraceRecord r;
    r.n_s = scenario_.n_s;
    r.n_t = n_t();
    r.values.assign(r.n_s * r.n_t, 0.0);
    r.arclengths = arclengths_;
    r.arc_spacing = scenario_.s_curve.sample_spacing(scenario_.n_s);
    r.closed = scenario_.s_curve.closed();
    r.dt_trace = dt_;
    r.t_obs = scenario_.t_obs;
    return r;
  }

  /// Initial state p = f, p_t = 0 (the first leapfrog step is taken by advance()).
  WaveState start(const GridField& f) const {
    check_initial(f);
    WaveState st;
    st.p_curr = embed(f);
    st.p_prev = st.p_curr.zeros_like();
    st.dt = dt_;
    return st;
  }

  /// One time step.
  void advance(WaveState& st) const {
    if (st.step == 0) {
      first_step(st.p_curr.values, st.p_prev.values);
      std::swap(st.p_curr, st.p_prev);  // p_prev now holds p^0
    } else {
      step(st.p_curr.values, st.p_prev.values, st.p_prev.values);
      std::swap(st.p_curr, st.p_prev);
    }
    ++st.step;
    st.t = double(st.step) * dt_;
  }

  SimulationResult simulate(const GridField& f) const {
    SimulationResult out;
    out.trace = empty_trace();
    WaveState st = start(f);
    GridField u, u_prev_p;
    if (opts_.track_energy) u = st.p_curr.zeros_like();

    auto record = [&](const WaveState& s) {
      sample(s.p_curr.values, out.trace, s.step);
      for (std::size_t i = 0; i < out.trace.n_s; ++i)
        if (!std::isfinite(out.trace(i, s.step)))
          throw BlowUpError(s.step, "non-finite pressure on the observation arc");
      if (s.step % 64 == 0 && !s.p_curr.all_finite())
        throw BlowUpError(s.step, "non-finite pressure");
      out.times.push_back(s.t);
      out.l2_norms.push_back(physical_norm(s.p_curr.values));
      if (opts_.track_energy) out.energy.push_back(discrete_energy(s.p_curr, u, speed_));
      if (opts_.snapshots_every > 0 && s.step % opts_.snapshots_every == 0) {
        out.snapshots.push_back(extract(s.p_curr.values));
        out.snapshot_times.push_back(s.t);
      }
    };

    record(st);
    for (std::size_t n = 0; n < n_steps_; ++n) {
      if (opts_.track_energy) u_prev_p = st.p_curr;
      advance(st);
      if (opts_.track_energy)
        for (std::size_t k = 0; k < u.size(); ++k)
          u.values[k] += 0.5 * dt_ * (u_prev_p.values[k] + st.p_curr.values[k]);
      record(st);
    }
    if (!st.p_curr.all_finite()) throw BlowUpError(st.step, "non-finite pressure");
    return out;
  }

  /// Forward map f -> g.
  TraceRecord forward(const GridField& f) const {
    TraceRecord out = empty_trace();
    WaveState st = start(f);
    sample(st.p_curr.values, out, 0);
    for (std::size_t n = 0; n < n_steps_; ++n) {
      advance(st);
      sample(st.p_curr.values, out, st.step);
      if (st.step % 64 == 0 && !st.p_curr.all_finite())
        throw BlowUpError(st.step, "non-finite pressure");
    }
    for (double v : out.values)
      if (!std::isfinite(v)) throw BlowUpError(n_steps_, "non-finite trace");
    return out;
  }

  /// Exact transpose of forward() with respect to the Gamma quadrature and the
  /// h^2-weighted grid inner product, restricted to omega. Solved backward in
  /// time with the weighted trace injected at the bilinear stencils of S.
  GridField adjoint(const TraceRecord& g) const {
    check_trace(g);
    const std::size_t N = n_steps_;
    const std::size_t M = NX_ * NY_;
    std::vector<double> mu_next2(M, 0.0), mu_next(M, 0.0), mu(M, 0.0), tmp(M, 0.0);
    // mu_next holds mu^{n+1}, mu_next2 holds mu^{n+2}.
    inject(g, N, mu_next);
    for (std::size_t n = N; n-- > 0;) {
      std::fill(mu.begin(), mu.end(), 0.0);
      inject(g, n, mu);
      if (n == 0) {
        // A1^T mu^1 = mu^1 + 1/2 L(coef mu^1)
        for (std::size_t k = 0; k < M; ++k) tmp[k] = coef_[k] * mu_next[k];
        laplacian_add(tmp, mu, 0.5);
        for (std::size_t k = 0; k < M; ++k) mu[k] += mu_next[k];
      } else {
        // B^T mu^{n+1} = 2 a mu^{n+1} + L(coef a mu^{n+1})
        for (std::size_t k = 0; k < M; ++k) tmp[k] = coef_[k] * damp_a_[k] * mu_next[k];
        laplacian_add(tmp, mu, 1.0);
        for (std::size_t k = 0; k < M; ++k) mu[k] += 2.0 * damp_a_[k] * mu_next[k];
      }
      if (n + 2 <= N)
        for (std::size_t k = 0; k < M; ++k) mu[k] -= damp_b_[k] * mu_next2[k];
      std::swap(mu_next2, mu_next);
      std::swap(mu_next, mu);
    }
    GridField out = extract(mu_next);
    const double inv_h2 = 1.0 / (h_ * h_);
    for (double& v : out.values) v *= inv_h2;
    mask_outside(out, scenario_.omega);
    if (!out.all_finite()) throw BlowUpError(0, "non-finite adjoint field");
    return out;
  }

  /// Time reversal: solves backward from t = T with zero terminal state while
  /// overwriting (strength 1) or relaxing toward (strength < 1) the recorded
  /// trace on the ring of cells within one cell of the circle carrying S.
  /// Ring cells at angles the arc does not cover receive zero.
  GridField time_reversal(const TraceRecord& g, double strength = 1.0) const {
    check_trace(g);
    const Ring ring = make_ring();
    const std::size_t M = NX_ * NY_;
    std::vector<double> q_next(M, 0.0), q(M, 0.0), q_prev(M, 0.0);
    const std::size_t N = n_steps_;
    impose(ring, g, N, q_next, strength);
    impose(ring, g, N - 1, q, strength);
    for (std::size_t n = N - 1; n-- > 0;) {
      step(q, q_next, q_prev);
      impose(ring, g, n, q_prev, strength);
      std::swap(q_next, q);
      std::swap(q, q_prev);
    }
    GridField out = extract(q);
    mask_outside(out, scenario_.omega);
    if (!out.all_finite()) throw BlowUpError(0, "non-finite time-reversal field");
    return out;
  }

  /// Embeds a physical-grid field into the computational grid.
  GridField embed(const GridField& f) const {
    GridField e(NX_, NY_, h_, origin_ - Vec2{double(pad_) * h_, double(pad_) * h_});
    for (std::size_t j = 0; j < ny_; ++j)
      std::copy_n(f.values.begin() + std::ptrdiff_t(j * nx_), nx_,
                  e.values.begin() + std::ptrdiff_t((j + pad_) * NX_ + pad_));
    return e;
  }

  GridField extract(const std::vector<double>& v) const {
    GridField f = physical_zeros();
    for (std::size_t j = 0; j < ny_; ++j)
      std::copy_n(v.begin() + std::ptrdiff_t((j + pad_) * NX_ + pad_), nx_,
                  f.values.begin() + std::ptrdiff_t(j * nx_));
    return f;
  }

 private:
  struct Stencil {
    std::array<std::size_t, 4> index{};
    std::array<double, 4> weight{};
  };
  struct Ring {
    std::vector<std::size_t> cells;
    std::vector<double> position;  // fractional arc-sample index, or -1 when unobserved
  };

  void check_initial(const GridField& f) const {
    if (f.nx != nx_ || f.ny != ny_ || f.h != h_ || !(f.origin == origin_))
      throw ValidationError("initial data is not on the solver grid");
    if (!f.all_finite()) throw ValidationError("initial data has non-finite values");
    if (!opts_.check_support) return;
    double peak = 0.0;
    for (double v : f.values) peak = std::max(peak, std::abs(v));
    const double tol = 1e-12 * peak;
    const Disc grown{scenario_.omega.center, scenario_.omega.radius + 1e-9};
    for (std::size_t j = 0; j < ny_; ++j)
      for (std::size_t i = 0; i < nx_; ++i)
        if (std::abs(f(i, j)) > tol && !grown.contains(f.node(i, j)))
          throw ValidationError("initial data is not supported inside omega");
  }

  void check_trace(const TraceRecord& g) const {
    if (g.n_s != scenario_.n_s || g.n_t != n_t() || std::abs(g.dt_trace - dt_) > 1e-12 * dt_)
      throw ValidationError("trace sampling does not match the scenario/solver");
  }

  double physical_norm(const std::vector<double>& v) const {
    double s = 0.0;
    for (std::size_t j = 0; j < ny_; ++j) {
      const double* row = v.data() + (j + pad_) * NX_ + pad_;
      for (std::size_t i = 0; i < nx_; ++i) s += row[i] * row[i];
    }
    return std::sqrt(s) * h_;
  }

  void sample(const std::vector<double>& p, TraceRecord& out, std::size_t n) const {
    for (std::size_t s = 0; s < sampler_.size(); ++s) {
      const auto& st = sampler_[s];
      out(s, n) = st.weight[0] * p[st.index[0]] + st.weight[1] * p[st.index[1]] +
                  st.weight[2] * p[st.index[2]] + st.weight[3] * p[st.index[3]];
    }
  }

  // r^n = R^T (W_n g^n)
  void inject(const TraceRecord& g, std::size_t n, std::vector<double>& out) const {
    const double tw = g.time_weight(n);
    for (std::size_t s = 0; s < sampler_.size(); ++s) {
      const double v = tw * arclengths_[s] * g(s, n);
      const auto& st = sampler_[s];
      for (int q = 0; q < 4; ++q) out[st.index[q]] += st.weight[q] * v;
    }
  }

  Ring make_ring() const {
    Ring ring;
    const Arc& arc = scenario_.s_curve;
    const std::size_t ns = scenario_.n_s;
    for (std::size_t j = 0; j < NY_; ++j) {
      for (std::size_t i = 0; i < NX_; ++i) {
        const Vec2 x = speed_.node(i, j);
        const Vec2 d = x - arc.center;
        if (std::abs(norm(d) - arc.radius) > h_) continue;
        const double deg = std::atan2(d.y, d.x) * 180.0 / std::numbers::pi;
        double pos = -1.0;
        if (arc.closed()) {
          pos = arc.offset_degrees(deg) / 360.0 * double(ns);
        } else if (arc.covers_degrees(deg)) {
          pos = arc.offset_degrees(deg) / arc.span_deg() * double(ns - 1);
        }
        ring.cells.push_back(j * NX_ + i);
        ring.position.push_back(pos);
      }
    }
    return ring;
  }

  void impose(const Ring& ring, const TraceRecord& g, std::size_t n, std::vector<double>& q,
              double strength) const {
    const std::size_t ns = g.n_s;
    for (std::size_t r = 0; r < ring.cells.size(); ++r) {
      const double pos = ring.position[r];
      double target = 0.0;
      if (pos >= 0.0) {
        auto i0 = std::size_t(std::floor(pos));
        const double w = pos - double(i0);
        std::size_t i1 = i0 + 1;
        if (scenario_.s_curve.closed()) {
          i0 %= ns;
          i1 %= ns;
        } else {
          i0 = std::min(i0, ns - 1);
          i1 = std::min(i1, ns - 1);
        }
        target = (1.0 - w) * g(i0, n) + w * g(i1, n);
      }
      double& v = q[ring.cells[r]];
      v += strength * (target - v);
    }
  }

  // out += scale * L v, 5-point Laplacian without the 1/h^2 factor.
  void laplacian_add(const std::vector<double>& v, std::vector<double>& out, double scale) const {
    const bool periodic = opts_.boundary == Boundary::periodic;
    for (std::size_t j = 0; j < NY_; ++j) {
      const double* row = v.data() + j * NX_;
      const double* up = j + 1 < NY_ ? v.data() + (j + 1) * NX_
                                     : (periodic ? v.data() : nullptr);
      const double* dn = j > 0 ? v.data() + (j - 1) * NX_
                               : (periodic ? v.data() + (NY_ - 1) * NX_ : nullptr);
      double* o = out.data() + j * NX_;
      for (std::size_t i = 0; i < NX_; ++i) {
        const double l = i > 0 ? row[i - 1] : (periodic ? row[NX_ - 1] : 0.0);
        const double r = i + 1 < NX_ ? row[i + 1] : (periodic ? row[0] : 0.0);
        const double u = up ? up[i] : 0.0;
        const double d = dn ? dn[i] : 0.0;
        o[i] += scale * (l + r + u + d - 4.0 * row[i]);
      }
    }
  }

  // p^1 = p^0 + 1/2 coef L p^0, written to `next`.
  void first_step(const std::vector<double>& cur, std::vector<double>& next) const {
    const std::size_t M = NX_ * NY_;
    std::vector<double> lap(M, 0.0);
    laplacian_add(cur, lap, 1.0);
    for (std::size_t k = 0; k < M; ++k) next[k] = cur[k] + 0.5 * coef_[k] * lap[k];
  }

  // next = a (2 cur + coef L cur) - b prev. `next` may alias `prev`.
  void step(const std::vector<double>& cur, const std::vector<double>& prev,
            std::vector<double>& next) const {
    const bool periodic = opts_.boundary == Boundary::periodic;
    const double* c = cur.data();
    const double* pv = prev.data();
    double* nx = next.data();
    const double* coef = coef_.data();
    const double* da = damp_a_.data();
    const double* db = damp_b_.data();
    const std::size_t W = NX_;
    for (std::size_t j = 0; j < NY_; ++j) {
      const std::size_t base = j * W;
      const double* row = c + base;
      const double* up = j + 1 < NY_ ? row + W : (periodic ? c : nullptr);
      const double* dn = j > 0 ? row - W : (periodic ? c + (NY_ - 1) * W : nullptr);
      auto edge = [&](std::size_t i) {
        const double l = i > 0 ? row[i - 1] : (periodic ? row[W - 1] : 0.0);
        const double r = i + 1 < W ? row[i + 1] : (periodic ? row[0] : 0.0);
        const double u = up ? up[i] : 0.0;
        const double d = dn ? dn[i] : 0.0;
        const std::size_t k = base + i;
        nx[k] = da[k] * (2.0 * row[i] + coef[k] * (l + r + u + d - 4.0 * row[i])) - db[k] * pv[k];
      };
      if (up && dn) {
        edge(0);
        const double* co = coef + base;
        const double* a = da + base;
        const double* b = db + base;
        const double* p0 = pv + base;
        double* o = nx + base;
        for (std::size_t i = 1; i + 1 < W; ++i) {
          const double lap = row[i - 1] + row[i + 1] + up[i] + dn[i] - 4.0 * row[i];
          o[i] = a[i] * (2.0 * row[i] + co[i] * lap) - b[i] * p0[i];
        }
        edge(W - 1);
      } else {
        for (std::size_t i = 0; i < W; ++i) edge(i);
      }
    }
  }

  Scenario scenario_;
  SolverOptions opts_;
  std::size_t nx_ = 0, ny_ = 0, NX_ = 0, NY_ = 0, pad_ = 0;
  double h_ = 0.0;
  Vec2 origin_;
  double dt_ = 0.0;
  std::size_t n_steps_ = 0;
  GridField speed_;
  std::vector<double> coef_, damp_a_, damp_b_;
  std::vector<Stencil> sampler_;
  std::vector<double> arclengths_;
};

/// Runs one forward simulation.
inline SimulationResult simulate(const SpeedField& field, const GridField& f, const Scenario& scenario,
                                 SolverOptions opts = {}) {
  return WavePropagator(field, scenario, f, opts).simulate(f);
}

/// Exact constant-speed solution on the periodic torus spanned by the grid:
/// p_hat(k, t) = f_hat(k) cos(c |k| t).
inline GridField spectral_oracle(const GridField& f, double c, double t) {
  if (!(c > 0.0)) throw ValidationError("spectral oracle needs a positive speed");
  std::vector<fft::cplx> data(f.values.begin(), f.values.end());
  fft::dft2(data, f.nx, f.ny, fft::Direction::forward);
  for (std::size_t j = 0; j < f.ny; ++j) {
    const double ky = fft::angular_frequency(j, f.ny, f.h);
    for (std::size_t i = 0; i < f.nx; ++i) {
      const double kx = fft::angular_frequency(i, f.nx, f.h);
      data[j * f.nx + i] *= std::cos(c * std::hypot(kx, ky) * t);
    }
  }
  fft::dft2(data, f.nx, f.ny, fft::Direction::backward);
  GridField out = f.zeros_like();
  const double scale = 1.0 / double(f.nx * f.ny);
  for (std::size_t k = 0; k < out.size(); ++k) out.values[k] = data[k].real() * scale;
  return out;
}

}  // namespace tat
