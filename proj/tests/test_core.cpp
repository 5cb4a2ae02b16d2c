#include <cstring>
#include <filesystem>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "tatlab/config.hpp"
#include "tatlab/csv.hpp"
#include "tatlab/geometry.hpp"
#include "tatlab/grid.hpp"
#include "tatlab/grid_io.hpp"
#include "tatlab/parallel.hpp"

using namespace tat;

TEST(Geometry, ArcDistanceInsideAndOutsideSpan) {
  const Arc arc{{0, 0}, 2.0, -60, 60};
  EXPECT_NEAR(arc.distance({2.5, 0}), 0.5, 1e-15);
  EXPECT_NEAR(arc.distance({0, 0}), 2.0, 1e-15);
  // Straight up: nearest point is the endpoint at +60 degrees.
  const Vec2 end{1.0, std::sqrt(3.0)};
  EXPECT_NEAR(arc.distance({0, 2}), norm(Vec2{0, 2} - end), 1e-12);
  EXPECT_FALSE(arc.closed());
  EXPECT_TRUE((Arc{{0, 0}, 1.0, 0, 360}).closed());
}

TEST(Geometry, ArcSamplingAndWeights) {
  const Arc open{{0, 0}, 1.0, 0, 90};
  const auto pts = open.sample(4);
  EXPECT_NEAR(pts.front().x, 1.0, 1e-15);
  EXPECT_NEAR(pts.back().y, 1.0, 1e-15);
  double total = 0.0;
  for (double w : open.arclength_weights(4)) total += w;
  EXPECT_NEAR(total, open.length(), 1e-14);

  const Arc circle{{0, 0}, 2.0, 0, 360};
  total = 0.0;
  for (double w : circle.arclength_weights(64)) total += w;
  EXPECT_NEAR(total, 4.0 * std::numbers::pi, 1e-12);
}

TEST(Geometry, VogelSampleStaysInDisc) {
  const Disc d{{0.5, -0.25}, 0.3};
  const auto pts = sample_disc(d, 50);
  ASSERT_EQ(pts.size(), 50u);
  EXPECT_EQ(pts.front(), d.center);
  for (const auto& p : pts) EXPECT_LE(norm(p - d.center), d.radius + 1e-14);
  EXPECT_NEAR(norm(pts.back() - d.center), d.radius, 1e-14);
}

TEST(Grid, CoveringGridAndInterpolation) {
  const Rect r{-1, 1, -0.5, 0.5};
  GridField g = grid_covering(r, 0.1);
  EXPECT_GE(g.extent().x_max, 1.0 - 1e-12);
  EXPECT_GE(g.extent().y_max, 0.5 - 1e-12);
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) g(i, j) = 2.0 * g.node(i, j).x - g.node(i, j).y;
  // Bilinear interpolation reproduces affine functions exactly.
  EXPECT_NEAR(g.interpolate({0.333, -0.123}), 2.0 * 0.333 + 0.123, 1e-12);
  EXPECT_THROW(g.interpolate({5, 0}), DomainError);
}

TEST(Config, RequiredKeyErrorNamesKey) {
  const Config cfg = Config::parse_string("[scenario]\nomega_radius = 1\n");
  try {
    cfg.get_double("scenario.t_obs");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "scenario.t_obs");
    EXPECT_NE(std::string(e.what()).find("scenario.t_obs"), std::string::npos);
  }
}

TEST(Config, TypedValuesOverridesAndUnknownKeys) {
  Config cfg = Config::parse_string("[a]\nx = 1.5\nn = 3\nflag = yes\nlist = 1, 2.5,3\n[b]\ny = text\n");
  EXPECT_DOUBLE_EQ(cfg.get_double("a.x"), 1.5);
  EXPECT_EQ(cfg.get_int("a.n"), 3);
  EXPECT_TRUE(cfg.get_bool("a.flag", false));
  EXPECT_EQ(cfg.get_list("a.list", {}), (std::vector<double>{1.0, 2.5, 3.0}));
  EXPECT_THROW(cfg.get_int("a.x"), ConfigError);
  cfg.apply_override("a.x=2.25");
  EXPECT_DOUBLE_EQ(cfg.get_double("a.x"), 2.25);
  EXPECT_THROW(cfg.apply_override("nodot"), ConfigError);

  try {
    cfg.reject_unknown({{"a", {"x", "n", "flag", "list"}}, {"b", {"z"}}});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "b.y");
  }
  EXPECT_NO_THROW(cfg.reject_unknown({{"a", {"x", "n", "flag", "list"}}, {"b", {"y"}}}));
}

TEST(Config, ResolvedEchoIncludesDefaults) {
  const Config cfg = Config::parse_string("[s]\nb = 2\n");
  EXPECT_DOUBLE_EQ(cfg.get_double("s.a", 0.5), 0.5);
  const std::string ini = cfg.resolved_ini();
  EXPECT_NE(ini.find("a = 0.5"), std::string::npos);
  EXPECT_NE(ini.find("b = 2"), std::string::npos);
  EXPECT_EQ(ini, cfg.resolved_ini());
}

namespace {

GridField random_field(std::size_t nx, std::size_t ny, unsigned seed) {
  GridField f(nx, ny, 0.0137, {-0.3, 1.7});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  for (auto& v : f.values) v = d(rng);
  return f;
}

}  // namespace

TEST(GridIo, RoundTripIsBitExact) {
  const GridField f = random_field(64, 64, 7);
  std::stringstream buf;
  write_grid(f, buf);
  EXPECT_EQ(buf.str().size(), 40u + 64u * 64u * 8u);
  const GridField g = read_grid(buf);
  ASSERT_EQ(g.nx, f.nx);
  ASSERT_EQ(g.ny, f.ny);
  EXPECT_EQ(std::memcmp(&g.h, &f.h, sizeof(double)), 0);
  EXPECT_EQ(g.origin, f.origin);
  EXPECT_EQ(std::memcmp(g.values.data(), f.values.data(), f.values.size() * sizeof(double)), 0);
}

TEST(GridIo, HeaderLayoutIsLittleEndian) {
  GridField f(3, 2, 0.5, {1.0, 2.0});
  std::stringstream buf;
  write_grid(f, buf);
  const std::string s = buf.str();
  EXPECT_EQ(s.substr(0, 4), "TATG");
  EXPECT_EQ(static_cast<unsigned char>(s[4]), 1u);  // version, low byte first
  EXPECT_EQ(static_cast<unsigned char>(s[8]), 3u);  // nx
  EXPECT_EQ(static_cast<unsigned char>(s[12]), 2u); // ny
}

TEST(GridIo, TruncationAndBadMagicReportOffsets) {
  const GridField f = random_field(8, 8, 3);
  std::stringstream buf;
  write_grid(f, buf);
  std::string bytes = buf.str();

  std::stringstream truncated(bytes.substr(0, bytes.size() - 5));
  try {
    read_grid(truncated);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_GE(e.offset(), 40u);
  }
  std::stringstream short_header(bytes.substr(0, 20));
  EXPECT_THROW(read_grid(short_header), FormatError);

  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream bad_magic(bad);
  try {
    read_grid(bad_magic);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
  std::string bad_version = bytes;
  bad_version[4] = 9;
  std::stringstream bv(bad_version);
  try {
    read_grid(bv);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
}

TEST(GridIo, HeaderOnlyInspection) {
  const GridField f = random_field(17, 5, 11);
  std::stringstream buf;
  write_grid(f, buf);
  std::stringstream header_only(buf.str().substr(0, 40));
  const GridHeader h = read_grid_header(header_only);
  EXPECT_EQ(h.nx, 17u);
  EXPECT_EQ(h.ny, 5u);
  EXPECT_EQ(h.h, f.h);
  EXPECT_EQ(h.origin, f.origin);
}

TEST(Csv, FormatIsStable) {
  std::ostringstream os;
  CsvWriter w(os, {"j", "sigma"});
  w.row({1.0, 0.1});
  EXPECT_EQ(os.str(), "j,sigma\n1,0.10000000000000001\n");
  EXPECT_THROW(w.row({1.0}), ValidationError);
}

TEST(Parallel, EveryIndexOnceAndLowestErrorRethrown) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
  for (int h : hits) EXPECT_EQ(h, 1);
  try {
    parallel_for(100, [](std::size_t i) {
      if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
    }, 3);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "17");
  }
}
