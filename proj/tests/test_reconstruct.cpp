#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "tatlab/reconstruct.hpp"
#include "tatlab/subspace.hpp"

using namespace tat;

namespace {

// Closed observation circle around omega, c = 1: the fully visible setting.
Scenario full_view(double t_obs) {
  Scenario sc;
  sc.domain_rect = {-1, 1, -1, 1};
  sc.omega = {{0, 0}, 0.5};
  sc.s_curve = {{0, 0}, 0.8, 0, 360};
  sc.n_s = 256;
  sc.u_region = {{0, 0}, 0.2};
  sc.t_obs = t_obs;
  sc.n_t = 2;
  return sc;
}

// Smooth blob pair under a bump window, supported in omega.
GridField smooth_phantom(const GridField& grid, const Disc& omega) {
  GridField f = grid.zeros_like();
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i) {
      const Vec2 x = f.node(i, j);
      const double r = norm(x - omega.center) / omega.radius;
      if (r >= 1.0) continue;
      const double window = std::exp(1.0 - 1.0 / (1.0 - r * r));
      f(i, j) = window * (std::exp(-norm2(x - Vec2{0.1, 0.05}) / 0.02) - 0.6 * std::exp(-norm2(x - Vec2{-0.15, -0.1}) / 0.01));
    }
  return f;
}

GridField random_field(const GridField& grid, const Disc& omega, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  GridField f = grid.zeros_like();
  for (auto& v : f.values) v = d(rng);
  mask_outside(f, omega);
  return f;
}

}  // namespace

TEST(TimeReversal, ZeroTraceGivesZero) {
  const Scenario sc = full_view(1.0);
  const GridField grid = grid_covering(sc.domain_rect, 0.02);
  WavePropagator prop(SpeedField::constant(1.0), sc, grid);
  const GridField f = time_reversal(prop, prop.empty_trace());
  for (double v : f.values) EXPECT_EQ(v, 0.0);
  TraceRecord wrong = prop.empty_trace();
  wrong.n_t -= 1;
  wrong.values.resize(wrong.n_s * wrong.n_t);
  EXPECT_THROW(time_reversal(prop, wrong), ValidationError);
}

TEST(TimeReversal, FullViewRecoversSmoothData) {
  const Scenario sc = full_view(2.4);  // T >= 2 diam(omega)
  const GridField grid(256, 256, 2.0 / 255.0, {-1, -1});
  WavePropagator prop(SpeedField::constant(1.0), sc, grid);
  const GridField f = smooth_phantom(grid, sc.omega);
  const GridField rec = time_reversal(prop, prop.forward(f));
  EXPECT_LT(relative_error(rec, f, sc.omega), 0.15);
}

TEST(Adjoint, ConsistentOverRandomPairs) {
  Scenario sc = full_view(1.5);
  sc.s_curve = {{0, 0}, 0.8, -60, 60};
  sc.n_s = 64;
  const GridField grid = grid_covering(sc.domain_rect, 0.025);
  WavePropagator prop(SpeedField::radial_bump(1.0, 0.3, {0.1, 0.0}, 0.3), sc, grid);
  std::mt19937_64 rng(77);
  std::normal_distribution<double> d;
  for (int pair = 0; pair < 10; ++pair) {
    const GridField f = random_field(grid, sc.omega, rng);
    TraceRecord g = prop.empty_trace();
    for (double& v : g.values) v = d(rng);
    const double lhs = inner(prop.forward(f), g), rhs = inner(f, prop.adjoint(g));
    EXPECT_NEAR(lhs, rhs, 0.01 * std::abs(lhs)) << "pair " << pair;
  }
}

TEST(Landweber, ZeroDataStaysZero) {
  const Scenario sc = full_view(1.2);
  const GridField grid = grid_covering(sc.domain_rect, 0.04);
  WavePropagator prop(SpeedField::constant(1.0), sc, grid);
  const ReconstructionResult r = landweber(prop, prop.empty_trace(), 3, 1.0);
  for (double v : r.f_rec.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(r.iterations, 3u);
  EXPECT_THROW(landweber(prop, prop.empty_trace(), 0, 1.0), ValidationError);
  EXPECT_THROW(landweber(prop, prop.empty_trace(), 2, 0.0), ValidationError);
}

TEST(Landweber, MonotoneAndConvergentInFullView) {
  const Scenario sc = full_view(2.4);
  const GridField grid = grid_covering(sc.domain_rect, 0.02);
  WavePropagator prop(SpeedField::constant(1.0), sc, grid);
  const double norm2 = estimate_operator_norm2(prop);
  ASSERT_GT(norm2, 0.0);
  EXPECT_EQ(norm2, estimate_operator_norm2(prop));  // fixed seed
  const GridField f = smooth_phantom(grid, sc.omega);
  const ReconstructionResult r = landweber(prop, prop.forward(f), 50, 1.0 / norm2, &f);
  ASSERT_EQ(r.residual_history.size(), 51u);
  for (std::size_t i = 1; i < r.residual_history.size(); ++i)
    EXPECT_LE(r.residual_history[i], r.residual_history[i - 1] * (1 + 1e-12)) << i;
  ASSERT_TRUE(r.rel_l2_error.has_value());
  EXPECT_LT(*r.rel_l2_error, 0.1);
}

TEST(Landweber, OversizedStepDiverges) {
  const Scenario sc = full_view(1.5);
  const GridField grid = grid_covering(sc.domain_rect, 0.04);
  WavePropagator prop(SpeedField::constant(1.0), sc, grid);
  const double norm2 = estimate_operator_norm2(prop);
  const GridField f = smooth_phantom(grid, sc.omega);
  try {
    landweber(prop, prop.forward(f), 40, 10.0 / norm2);
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_DOUBLE_EQ(e.step(), 10.0 / norm2);
  }
}

TEST(ConeResidual, IsotropicSpectrumGivesAngularShare) {
  const GridField grid = grid_covering({-1, 1, -1, 1}, 0.01);
  GridField f = grid.zeros_like();
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i) f(i, j) = std::exp(-norm2(f.node(i, j)) / (2 * 0.05 * 0.05));
  for (Vec2 dir : {Vec2{0, 1}, Vec2{1, 0.3}})
    EXPECT_NEAR(cone_residual_energy(f, dir, 15.0), 2.0 * 15.0 / 180.0, 0.02);
  EXPECT_THROW(cone_residual_energy(grid.zeros_like(), {0, 1}, 15.0), ValidationError);
  EXPECT_THROW(cone_residual_energy(f, {0, 1}, 95.0), ValidationError);
}

TEST(ConeResidual, InvisibleProductConcentrates) {
  const GridField grid = grid_covering({-0.5, 0.5, -0.5, 0.5}, 2e-3);
  const Vec2 dir{std::cos(1.2), std::sin(1.2)};
  const GridField f = ProductFunction{{0, 0}, 0.25, 0.15, 30, dir}.sample(grid, Disc{{0, 0}, 0.45});
  EXPECT_GE(cone_residual_energy(f, dir, 15.0), 0.9);
}

TEST(ResidualCsv, Format) {
  std::ostringstream os;
  write_residual_csv(os, {2.0, 0.5});
  EXPECT_EQ(os.str(), "iter,residual\n0,2\n1,0.5\n");
}
