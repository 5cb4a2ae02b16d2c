#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "tatlab/medium.hpp"

using namespace tat;

namespace {

// Central-difference gradient of c^2, an oracle independent of grad_c2().
Vec2 fd_grad_c2(const SpeedField& c, Vec2 x, double d = 1e-5) {
  const auto c2 = [&](Vec2 p) { return c.eval(p) * c.eval(p); };
  return {(c2(x + Vec2{d, 0}) - c2(x - Vec2{d, 0})) / (2 * d), (c2(x + Vec2{0, d}) - c2(x - Vec2{0, d})) / (2 * d)};
}

}  // namespace

TEST(SpeedField, WaveguideAtChannelCenter) {
  const auto c = SpeedField::gaussian_waveguide(0.3, 1.0, std::sqrt(0.1));
  EXPECT_NEAR(c.eval({1.0, 0.0}), 0.7, 1e-15);
  EXPECT_NEAR(c.eval({0.0, -1.0}), 0.7, 1e-15);
  EXPECT_NEAR(c.c_min(), 0.7, 1e-15);
  EXPECT_NEAR(c.c_max(), 1.0, 1e-15);
}

TEST(SpeedField, ConstantAndLinear) {
  const auto k = SpeedField::constant(1.5);
  EXPECT_EQ(k.eval({3, 4}), 1.5);
  EXPECT_EQ(grad_c2(k, {3, 4}), (Vec2{0, 0}));
  const auto lin = SpeedField::linear_gradient(1.0, 0.5, {-1, 1, -1, 1});
  EXPECT_NEAR(lin.eval({0.3, 0.4}), 1.2, 1e-15);
  EXPECT_NEAR(lin.c_min(), 0.5, 1e-15);
  EXPECT_NEAR(lin.c_max(), 1.5, 1e-15);
}

TEST(SpeedField, AnalyticGradientsMatchFiniteDifferences) {
  const std::vector<SpeedField> fields = {
      SpeedField::linear_gradient(1.0, 0.5, {-2, 2, -1.5, 1.5}),
      SpeedField::gaussian_waveguide(0.3, 1.0, 0.1),
      SpeedField::radial_bump(1.0, 0.4, {0.2, -0.1}, 0.5),
  };
  for (const auto& c : fields) {
    for (Vec2 x : {Vec2{0.3, 0.2}, Vec2{0.95, 0.1}, Vec2{-0.4, 0.8}, Vec2{1.02, -0.05}}) {
      const Vec2 a = grad_c2(c, x), f = fd_grad_c2(c, x);
      EXPECT_NEAR(a.x, f.x, 1e-6 * (1 + std::abs(f.x))) << to_string(c.kind());
      EXPECT_NEAR(a.y, f.y, 1e-6 * (1 + std::abs(f.y))) << to_string(c.kind());
    }
  }
}

TEST(SpeedField, GriddedInterpolatesNodes) {
  GridField g(21, 21, 0.1, {-1, -1});
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) g(i, j) = 1.0 + 0.1 * g.node(i, j).x;
  const auto c = SpeedField::gridded(g);
  EXPECT_NEAR(c.eval({0.25, 0.3}), 1.025, 1e-12);
  EXPECT_NEAR(c.c_min(), 0.9, 1e-12);
  // d(c^2)/dx = 2 c * 0.1 at the node x = 0.
  EXPECT_NEAR(grad_c2(c, {0.0, 0.0}).x, 0.2, 1e-12);
}

TEST(SpeedField, RejectsBadInputs) {
  const auto c = SpeedField::constant(1.0);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(eval_speed(c, {nan, 0}), ValidationError);
  EXPECT_THROW(grad_c2(c, {0, nan}), ValidationError);
  const auto lin = SpeedField::linear_gradient(1.0, 0.5, {-1, 1, -1, 1});
  EXPECT_THROW(lin.eval({0, 5}), InvariantError);  // c = 3.5 > c_max
  EXPECT_THROW(SpeedField::constant(0.0), ValidationError);
  EXPECT_THROW(SpeedField::gaussian_waveguide(1.2, 1.0, 0.1), ValidationError);
}

TEST(SpeedField, BoundsHoldOverSamples) {
  const std::vector<SpeedField> fields = {
      SpeedField::gaussian_waveguide(0.3, 1.0, 0.1),
      SpeedField::radial_bump(1.0, 0.4, {0.2, -0.1}, 0.5),
  };
  for (const auto& c : fields)
    for (int i = -20; i <= 20; ++i)
      for (int j = -20; j <= 20; ++j) {
        const double v = c.eval({0.1 * i, 0.1 * j});
        EXPECT_GE(v, c.c_min());
        EXPECT_LE(v, c.c_max());
      }
}

namespace {

Scenario limited_view() {
  Scenario sc;
  sc.domain_rect = {-2.5, 2.5, -2.5, 2.5};
  sc.omega = {{0, 0}, 1.5};
  sc.s_curve = {{0, 0}, 2.0, -60, 60};
  sc.u_region = {{0, 0}, 0.3};
  sc.v_margin = 0.05;
  sc.t_obs = 3.0;
  return sc;
}

}  // namespace

TEST(Scenario, ValidationCatchesGeometryErrors) {
  EXPECT_NO_THROW(limited_view().validate());
  auto a = limited_view();
  a.u_region.radius = 2.0;
  EXPECT_THROW(a.validate(), ValidationError);
  auto b = limited_view();
  b.omega.radius = 3.0;
  EXPECT_THROW(b.validate(), ValidationError);
  auto c = limited_view();
  c.s_curve.radius = 2.6;
  EXPECT_THROW(c.validate(), ValidationError);
  auto d = limited_view();
  d.t_obs = 0.0;
  EXPECT_THROW(d.validate(), ValidationError);
}

TEST(Scenario, BuildFromConfig) {
  const std::string text =
      "[scenario]\ndomain_x_min=-2.5\ndomain_x_max=2.5\ndomain_y_min=-2.5\ndomain_y_max=2.5\n"
      "omega_radius=1.5\ns_radius=2\ns_angle_start=-60\ns_angle_end=60\nv_margin=0.05\nu_radius=0.3\n";
  const Config missing = Config::parse_string(text);
  try {
    build_scenario(missing);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "scenario.t_obs");
  }
  const Config full = Config::parse_string(text + "t_obs=3\n[medium]\nkind=gaussian_waveguide\na=0.3\nr0=1\nsigma=0.1\n");
  const Scenario sc = build_scenario(full);
  EXPECT_EQ(sc.n_s, 128u);
  EXPECT_DOUBLE_EQ(sc.s_curve.start_deg, -60.0);
  const SpeedField c = build_speed(full, sc.domain_rect);
  EXPECT_EQ(c.kind(), SpeedKind::gaussian_waveguide);
  Config bad = full;
  bad.set("medium.kind", "plasma");
  EXPECT_THROW(build_speed(bad, sc.domain_rect), ConfigError);
}
