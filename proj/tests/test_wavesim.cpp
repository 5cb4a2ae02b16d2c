#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "tatlab/wavesim.hpp"

using namespace tat;

namespace {

// Periodic [-1, 1)^2 lattice with n nodes per side.
GridField torus_grid(std::size_t n) { return GridField(n, n, 2.0 / double(n), {-1, -1}); }

Scenario torus_scenario(const GridField& g, double t) {
  Scenario sc;
  sc.domain_rect = g.extent();
  sc.omega = {{0, 0}, 0.95};
  sc.s_curve = {{0, 0}, 0.5, 0, 360};
  sc.n_s = 16;
  sc.u_region = {{0, 0}, 0.1};
  sc.t_obs = t;
  sc.n_t = 2;
  return sc;
}

GridField gaussian(const GridField& grid, Vec2 c, double w) {
  GridField f = grid.zeros_like();
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i) f(i, j) = std::exp(-norm2(f.node(i, j) - c) / (2 * w * w));
  return f;
}

double rel_error(const GridField& a, const GridField& b) {
  double e = 0, r = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    e += (a.values[k] - b.values[k]) * (a.values[k] - b.values[k]);
    r += b.values[k] * b.values[k];
  }
  return std::sqrt(e / r);
}

GridField periodic_solve(const GridField& f, double c, double t) {
  SolverOptions o;
  o.boundary = Boundary::periodic;
  o.check_support = false;
  WavePropagator prop(SpeedField::constant(c), torus_scenario(f, t), f, o);
  WaveState st = prop.start(f);
  while (st.step < prop.n_steps()) prop.advance(st);
  return st.p_curr;
}

// Limited-view scenario on [-2, 2]^2 used by the sponge-bounded tests.
Scenario box_scenario(double t_obs) {
  Scenario sc;
  sc.domain_rect = {-2, 2, -2, 2};
  sc.omega = {{0, 0}, 1.2};
  sc.s_curve = {{0, 0}, 1.6, -60, 60};
  sc.n_s = 64;
  sc.u_region = {{0, 0}, 0.3};
  sc.t_obs = t_obs;
  sc.n_t = 2;
  return sc;
}

// Smooth random field supported in omega: random Gaussians under a bump window.
GridField random_smooth(const GridField& grid, const Disc& omega, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-0.6, 0.6), amp(-1, 1), width(0.05, 0.2);
  GridField f = grid.zeros_like();
  for (int b = 0; b < 6; ++b) {
    const Vec2 c{pos(rng), pos(rng)};
    const double a = amp(rng), w = width(rng);
    for (std::size_t j = 0; j < f.ny; ++j)
      for (std::size_t i = 0; i < f.nx; ++i) f(i, j) += a * std::exp(-norm2(f.node(i, j) - c) / (2 * w * w));
  }
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i) {
      const double r = norm(f.node(i, j) - omega.center) / omega.radius;
      f(i, j) *= r < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0;
    }
  return f;
}

}  // namespace

TEST(SpectralOracle, IdentityAtTimeZero) {
  const GridField f = gaussian(torus_grid(64), {0.1, -0.2}, 0.15);
  EXPECT_LT(rel_error(spectral_oracle(f, 1.0, 0.0), f), 1e-14);
}

TEST(WaveSolver, SingleModeMatchesCosine) {
  const GridField g = torus_grid(128);
  GridField f = g.zeros_like();
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i) f(i, j) = std::cos(std::numbers::pi * f.node(i, j).x);
  const double t = 0.5;
  GridField expected = f;
  for (double& v : expected.values) v *= std::cos(std::numbers::pi * t);
  const GridField p = periodic_solve(f, 1.0, t);
  double worst = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) worst = std::max(worst, std::abs(p.values[k] - expected.values[k]));
  EXPECT_LT(worst, 1e-3);
}

TEST(WaveSolver, PlaneWaveSplitsLikeDAlembert) {
  // f(x) = g(x) in 1D: p = (g(x - t) + g(x + t)) / 2 on the periodic line.
  const GridField grid = torus_grid(256);
  const auto profile = [](double x) {
    double v = 0.0;
    for (int w = -1; w <= 1; ++w) v += std::exp(-std::pow(x - 2.0 * w, 2) / (2 * 0.08 * 0.08));
    return v;
  };
  GridField f = grid.zeros_like();
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i) f(i, j) = profile(f.node(i, j).x);
  const double t = 0.4;
  GridField expected = f.zeros_like();
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i) {
      const double x = f.node(i, j).x;
      expected(i, j) = 0.5 * (profile(x - t) + profile(x + t));
    }
  EXPECT_LT(rel_error(periodic_solve(f, 1.0, t), expected), 2e-2);
}

TEST(WaveSolver, ConvergesToSpectralOracle) {
  double errors[2];
  int idx = 0;
  for (std::size_t n : {128u, 256u}) {
    const GridField f = gaussian(torus_grid(n), {0, 0}, 0.1);
    errors[idx++] = rel_error(periodic_solve(f, 1.0, 0.5), spectral_oracle(f, 1.0, 0.5));
  }
  EXPECT_LT(errors[1], 1e-2);
  EXPECT_GE(errors[0] / errors[1], 3.5);
}

TEST(WaveSolver, ZeroDataGivesZeroTrace) {
  const double h = 0.02;
  const Scenario sc = box_scenario(1.0);
  const GridField g = grid_covering(sc.domain_rect, h);
  WavePropagator prop(SpeedField::constant(1.0), sc, g);
  const TraceRecord tr = prop.forward(g.zeros_like());
  for (double v : tr.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(tr.n_t, prop.n_t());
  EXPECT_NEAR(tr.dt_trace * double(tr.n_t - 1), sc.t_obs, 1e-12);
}

TEST(WaveSolver, EnergyConservedBeforeSponge) {
  const double h = 0.01;
  Scenario sc = box_scenario(1.2);
  const GridField g = grid_covering(sc.domain_rect, h);
  const auto c = SpeedField::radial_bump(1.0, 0.3, {0.1, 0}, 0.4);
  SolverOptions o;
  o.track_energy = true;
  const GridField f = gaussian(g, {0, 0}, 0.12);
  const SimulationResult r = simulate(c, f, sc, o);
  const double e0 = r.energy[0];
  double f2 = 0.0;
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i) f2 += std::pow(f(i, j) / c.eval(f.node(i, j)), 2) * h * h;
  EXPECT_NEAR(e0, f2, 1e-14 * f2);
  double worst = 0.0;
  for (std::size_t n = 0; n < r.energy.size(); ++n) worst = std::max(worst, std::abs(r.energy[n] - e0) / e0);
  EXPECT_LT(worst, 5e-3);
}

TEST(WaveSolver, L2BoundForRandomData) {
  const double h = 0.02;
  const Scenario sc = box_scenario(0.6);
  const GridField g = grid_covering(sc.domain_rect, h);
  const auto c = SpeedField::gaussian_waveguide(0.3, 0.5, 0.2);
  const double bound = c.c_max() / c.c_min() * 1.05;
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const GridField f = random_smooth(g, sc.omega, rng);
    const SimulationResult r = simulate(c, f, sc);
    const double f_norm = r.l2_norms.front();
    for (double n : r.l2_norms) ASSERT_LE(n, bound * f_norm) << "trial " << trial;
  }
}

TEST(WaveSolver, ForwardMapIsLinear) {
  const double h = 0.02;
  const Scenario sc = box_scenario(1.5);
  const GridField g = grid_covering(sc.domain_rect, h);
  WavePropagator prop(SpeedField::radial_bump(1.0, 0.3, {0.2, 0.1}, 0.5), sc, g);
  std::mt19937_64 rng(3);
  const GridField a = random_smooth(g, sc.omega, rng), b = random_smooth(g, sc.omega, rng);
  GridField combo = a;
  for (std::size_t k = 0; k < combo.size(); ++k) combo.values[k] = 2.0 * a.values[k] - 0.5 * b.values[k];
  const TraceRecord ta = prop.forward(a), tb = prop.forward(b), tc = prop.forward(combo);
  double err = 0.0, ref = 0.0;
  for (std::size_t k = 0; k < tc.values.size(); ++k) {
    const double e = 2.0 * ta.values[k] - 0.5 * tb.values[k];
    err = std::max(err, std::abs(tc.values[k] - e));
    ref = std::max(ref, std::abs(e));
  }
  EXPECT_LT(err, 1e-12 * ref);
}

TEST(WaveSolver, AdjointIsDiscreteTranspose) {
  const double h = 0.025;
  const Scenario sc = box_scenario(1.5);
  const GridField g = grid_covering(sc.domain_rect, h);
  WavePropagator prop(SpeedField::gaussian_waveguide(0.3, 0.8, 0.2), sc, g);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 3; ++trial) {
    const GridField f = random_smooth(g, sc.omega, rng);
    TraceRecord y = prop.empty_trace();
    for (double& v : y.values) v = nd(rng);
    const double lhs = inner(prop.forward(f), y);
    const double rhs = inner(f, prop.adjoint(y));
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::abs(lhs));
  }
}

TEST(WaveSolver, RejectsBadConfigurations) {
  const double h = 0.05;
  const Scenario sc = box_scenario(1.0);
  const GridField g = grid_covering(sc.domain_rect, h);
  const auto c = SpeedField::constant(1.0);
  SolverOptions fast;
  fast.cfl = 0.8;
  EXPECT_THROW(WavePropagator(c, sc, g, fast), ConfigError);
  SolverOptions big_dt;
  big_dt.dt = h;
  EXPECT_THROW(WavePropagator(c, sc, g, big_dt), ConfigError);

  WavePropagator prop(c, sc, g);
  GridField outside = gaussian(g, {1.7, 1.7}, 0.05);
  EXPECT_THROW(prop.forward(outside), ValidationError);

  SolverOptions loose;
  loose.check_support = false;
  WavePropagator unchecked(c, sc, g, loose);
  GridField huge = g.zeros_like();
  for (std::size_t j = 0; j < huge.ny; ++j)
    for (std::size_t i = 0; i < huge.nx; ++i) huge(i, j) = ((i + j) % 2 ? 1.0 : -1.0) * 1e308;
  EXPECT_THROW(unchecked.forward(huge), BlowUpError);
}

TEST(WaveSolver, SpongeReflectsLittleEnergy) {
  // A Ricker pulse (about 11 cells per dominant wavelength) on the working
  // domain and on a domain so large that its boundary stays causally out of
  // reach. Their difference inside the observation circle is the energy the
  // default sponge sends back.
  const double h = 0.02, w = 0.05;
  Scenario sc = box_scenario(6.0);
  sc.s_curve = {{0, 0}, 1.6, 0, 360};
  Scenario big = sc;
  big.domain_rect = {-8.2, 8.2, -8.2, 8.2};
  const auto c = SpeedField::constant(1.0);
  const auto ricker = [&](const GridField& grid) {
    GridField f = grid.zeros_like();
    for (std::size_t j = 0; j < f.ny; ++j)
      for (std::size_t i = 0; i < f.nx; ++i) {
        const double r2 = norm2(f.node(i, j) - Vec2{0.2, 0}) / (w * w);
        f(i, j) = (1 - r2) * std::exp(-r2 / 2);
      }
    return f;
  };
  const GridField g = grid_covering(sc.domain_rect, h), gb = grid_covering(big.domain_rect, h);
  const WavePropagator small_prop(c, sc, g), big_prop(c, big, gb);
  WaveState a = small_prop.start(ricker(g)), b = big_prop.start(ricker(gb));
  const double f2 = inner(ricker(g), ricker(g));
  const auto off = std::size_t(std::llround((g.origin.x - gb.origin.x) / h));
  double worst = 0.0;
  while (a.step < small_prop.n_steps()) {
    small_prop.advance(a);
    big_prop.advance(b);
    const GridField pa = small_prop.extract(a.p_curr.values), pb = big_prop.extract(b.p_curr.values);
    double d = 0.0;
    for (std::size_t j = 0; j < pa.ny; ++j)
      for (std::size_t i = 0; i < pa.nx; ++i) {
        if (norm(pa.node(i, j)) > sc.s_curve.radius) continue;
        const double e = pa(i, j) - pb(i + off, j + off);
        d += e * e;
      }
    worst = std::max(worst, d * h * h / f2);
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(WaveSolver, RefiningTimeSamplesKeepsTraceNorm) {
  const double h = 0.02;
  Scenario sc = box_scenario(1.5);
  const GridField g = grid_covering(sc.domain_rect, h);
  const auto c = SpeedField::constant(1.0);
  const GridField f = gaussian(g, {0.3, 0.1}, 0.1);
  const double a = l2_norm(WavePropagator(c, sc, g).forward(f));
  SolverOptions o;
  o.cfl = 0.25;
  const double b = l2_norm(WavePropagator(c, sc, g, o).forward(f));
  EXPECT_NEAR(a, b, 0.01 * b);
}
