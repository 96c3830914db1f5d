#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ddloc/lrf_geometry.hpp"

using namespace ddloc;
using namespace ddloc::lrf;

TEST(LrfProject, Examples) {
  Point3 p = project({0.0, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(p.x, 1.0);
  EXPECT_DOUBLE_EQ(p.y, 0.0);
  EXPECT_DOUBLE_EQ(p.z, 0.0);

  p = project({0.0, kPi / 2, 0.04});
  EXPECT_NEAR(p.x, 0.0, 1e-17);
  EXPECT_DOUBLE_EQ(p.y, 0.04);
  EXPECT_EQ(p.z, 0.0);

  p = project({deg_to_rad(25.0), 0.0, 2.0});
  EXPECT_NEAR(p.x, 1.8126156, 1e-7);
  EXPECT_EQ(p.y, 0.0);
  EXPECT_NEAR(p.z, 0.8452365, 1e-7);
}

TEST(LrfProject, RejectsOutOfRange) {
  EXPECT_THROW(project({0.0, 0.0, 0.03}), OutOfRange);
  EXPECT_THROW(project({0.0, 0.0, 80.5}), OutOfRange);
  EXPECT_THROW(project({0.0, 1.6, 1.0}), OutOfRange);
  EXPECT_THROW(project({deg_to_rad(26.0), 0.0, 1.0}), OutOfRange);
  EXPECT_THROW(project({-0.01, 0.0, 1.0}), OutOfRange);
  try {
    project({0.0, 0.0, 100.0});
    FAIL();
  } catch (const OutOfRange& e) {
    EXPECT_NE(std::string(e.what()).find("range"), std::string::npos);
  }
}

TEST(LrfUnproject, Examples) {
  const LrfSample s = unproject({1.0, 0.0, 0.0});
  EXPECT_EQ(s.alpha, 0.0);
  EXPECT_EQ(s.beta, 0.0);
  EXPECT_EQ(s.range, 1.0);
  EXPECT_THROW(unproject({0.0, 0.0, 1.0}), OutOfRange);
  EXPECT_THROW(unproject({-1.0, 0.0, 0.0}), OutOfRange);
  EXPECT_THROW(unproject({0.01, 0.0, 0.0}), OutOfRange);
}

TEST(LrfProperties, NormPreservationAndRoundTrip) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> alpha(0.0, kMaxPitch);
  std::uniform_real_distribution<double> beta(-kMaxBearing, kMaxBearing);
  std::uniform_real_distribution<double> range(kMinRange, kMaxRange);
  for (int i = 0; i < 20000; ++i) {
    const LrfSample s{alpha(rng), beta(rng), range(rng)};
    const Point3 p = project(s);
    EXPECT_LE(std::abs(p.norm() - s.range), 1e-9 * s.range);
    const LrfSample back = unproject(p);
    EXPECT_NEAR(back.range, s.range, 1e-9);
    EXPECT_NEAR(back.beta, s.beta, 1e-9);
    EXPECT_NEAR(back.alpha, s.alpha, 1e-9);
    const Point3 q = project(back);
    EXPECT_NEAR(q.x, p.x, 1e-9);
    EXPECT_NEAR(q.y, p.y, 1e-9);
    EXPECT_NEAR(q.z, p.z, 1e-9);
  }
}

TEST(LrfProperties, BearingTurnsCounterClockwise) {
  for (double b = -1.5; b < 1.5; b += 0.1) {
    const Point3 a = project({0.0, b, 5.0});
    const Point3 c = project({0.0, b + 0.05, 5.0});
    EXPECT_GT(a.x * c.y - a.y * c.x, 0.0);
  }
}

TEST(SweepToCloud, EmptyAndCardinality) {
  EXPECT_TRUE(sweep_to_cloud({}).points.empty());

  std::vector<ScanPlane> sweep;
  for (double a : {0.0, 0.2}) {
    sweep.push_back({a, {{-0.5, 1.0}, {0.0, 2.0}, {0.5, 3.0}}});
  }
  const Cloud cloud = sweep_to_cloud(sweep);
  ASSERT_EQ(cloud.points.size(), 6u);
  EXPECT_EQ(cloud.rejected, 0u);
  for (std::size_t i = 0; i < 6; ++i) {
    const ScanPlane& plane = sweep[i / 3];
    const Point3 expected = project({plane.alpha, plane.beams[i % 3].beta, plane.beams[i % 3].range});
    EXPECT_EQ(cloud.points[i].x, expected.x);
    EXPECT_EQ(cloud.points[i].z, expected.z);
  }
}

TEST(SweepToCloud, DropsAndCountsInvalidBeams) {
  const std::vector<ScanPlane> sweep{{0.0, {{0.0, 1.0}, {0.0, 0.01}, {2.0, 1.0}, {0.1, 90.0}}},
                                     {1.0, {{0.0, 1.0}}}};
  const Cloud cloud = sweep_to_cloud(sweep);
  EXPECT_EQ(cloud.points.size(), 1u);
  EXPECT_EQ(cloud.rejected, 4u);
}

TEST(SweepToCloud, FlatWallIsPlanar) {
  std::vector<ScanPlane> sweep;
  for (int a = 0; a <= 25; a += 5) {
    ScanPlane plane{deg_to_rad(a), {}};
    for (int b = -80; b <= 80; b += 4) {
      const double beta = deg_to_rad(b);
      plane.beams.push_back({beta, 5.0 / (std::cos(plane.alpha) * std::cos(beta))});
    }
    sweep.push_back(plane);
  }
  const Cloud cloud = sweep_to_cloud(sweep);
  EXPECT_EQ(cloud.rejected, 0u);
  for (const Point3& p : cloud.points) EXPECT_NEAR(p.x, 5.0, 1e-9);
}
