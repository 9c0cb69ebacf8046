// Copyright 2026 The slipgain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "slipgain/trajectory.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"

namespace slipgain {
namespace {

constexpr double kPi = std::numbers::pi;

// Independent nearest-sample search used as the projection oracle.
std::size_t NearestSample(const ReferenceTrajectory& t, double x, double y) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double d = std::hypot(t[i].x - x, t[i].y - y);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

TEST(CubicSpline1DTest, InterpolatesKnotsAndReproducesLines) {
  const CubicSpline1D spline({0.0, 1.0, 2.5, 4.0}, {1.0, 3.0, 6.0, 9.0});
  EXPECT_DOUBLE_EQ(spline.Value(0.0), 1.0);
  EXPECT_DOUBLE_EQ(spline.Value(1.0), 3.0);
  EXPECT_DOUBLE_EQ(spline.Value(2.5), 6.0);
  EXPECT_NEAR(spline.Value(4.0), 9.0, 1e-12);
  for (double t = 0.0; t <= 4.0; t += 0.1) {
    EXPECT_NEAR(spline.Value(t), 1.0 + 2.0 * t, 1e-12);
    EXPECT_NEAR(spline.Derivative(t), 2.0, 1e-12);
  }
}

TEST(CubicSpline1DTest, NaturalEndConditions) {
  const CubicSpline1D spline({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 0.0, 1.0});
  const double h = 1e-5;
  for (double t : {0.0 + h, 3.0 - h}) {
    const double second =
        (spline.Derivative(t + h) - spline.Derivative(t - h)) / (2.0 * h);
    EXPECT_NEAR(second, 0.0, 1e-3);
  }
}

TEST(GenerateSplineTest, CollinearWaypointsGiveStraightLine) {
  const std::vector<Waypoint> wps{{0, 0}, {1, 0}, {2, 0}};
  const ReferenceTrajectory t = GenerateSpline(wps, 0.1);
  ASSERT_EQ(t.size(), 21u);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(t[i].x, 0.1 * i, 1e-9);
    EXPECT_NEAR(t[i].y, 0.0, 1e-12);
    EXPECT_NEAR(t[i].yaw, 0.0, 1e-12);
  }
}

TEST(GenerateSplineTest, TwoPointsGiveSegment) {
  const std::vector<Waypoint> wps{{0, 0}, {1, 1}};
  const ReferenceTrajectory t = GenerateSpline(wps, 0.1);
  EXPECT_NEAR(t.back().x, 1.0, 1e-6);
  EXPECT_NEAR(t.back().y, 1.0, 1e-6);
  EXPECT_NEAR(t.back().yaw, kPi / 4.0, 1e-6);
  EXPECT_NEAR(t.length(), std::sqrt(2.0), 1e-9);
}

TEST(GenerateSplineTest, RandomFamilyReproducesWaypoints) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    const std::vector<Waypoint> wps = SampleRandomWaypoints(rng);
    const ReferenceTrajectory t = GenerateSpline(wps, 0.05);
    for (const Waypoint& w : wps) {
      const std::size_t i = NearestSample(t, w.x, w.y);
      EXPECT_LT(std::hypot(t[i].x - w.x, t[i].y - w.y), 1e-6) << "seed " << seed;
    }
    EXPECT_EQ(t.front().x, wps.front().x);
    EXPECT_EQ(t.back().y, wps.back().y);
    for (std::size_t i = 1; i < t.size(); ++i) {
      const double step = std::hypot(t[i].x - t[i - 1].x, t[i].y - t[i - 1].y);
      EXPECT_GT(step, 0.0);
      EXPECT_LE(step, 2.0 * 0.05);
      EXPECT_GT(t[i].arclength, t[i - 1].arclength);
      EXPECT_LT(std::abs(std::remainder(t[i].yaw - t[i - 1].yaw, 2 * kPi)),
                kPi / 2.0)
          << "seed " << seed << " sample " << i;
      EXPECT_GT(t[i].yaw, -kPi);
      EXPECT_LE(t[i].yaw, kPi);
    }
  }
}

TEST(GenerateSplineTest, IsBitReproducible) {
  std::mt19937_64 a(9), b(9);
  const ReferenceTrajectory ta = GenerateSpline(SampleRandomWaypoints(a));
  const ReferenceTrajectory tb = GenerateSpline(SampleRandomWaypoints(b));
  ASSERT_EQ(ta.size(), tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) {
    EXPECT_EQ(ta[i].x, tb[i].x);
    EXPECT_EQ(ta[i].y, tb[i].y);
    EXPECT_EQ(ta[i].yaw, tb[i].yaw);
  }
}

TEST(GenerateSplineTest, RejectsDegenerateInput) {
  const std::vector<Waypoint> dup{{0, 0}, {1, 0}, {1, 0}};
  EXPECT_THROW(GenerateSpline(dup, 0.05), std::invalid_argument);
  const std::vector<Waypoint> ok{{0, 0}, {1, 0}};
  EXPECT_THROW(GenerateSpline(ok, 0.0), std::invalid_argument);
  EXPECT_THROW(GenerateSpline(ok, -0.1), std::invalid_argument);
  const std::vector<Waypoint> single{{0, 0}};
  EXPECT_THROW(GenerateSpline(single, 0.05), std::invalid_argument);
}

TEST(SampleRandomWaypointsTest, RespectsSpacingAndStartBox) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed);
    const std::vector<Waypoint> wps = SampleRandomWaypoints(rng);
    ASSERT_EQ(wps.size(), 5u);
    EXPECT_GE(wps[0].x, 1.0);
    EXPECT_LE(wps[0].x, 2.0);
    EXPECT_GE(wps[0].y, 3.5);
    EXPECT_LE(wps[0].y, 4.5);
    for (std::size_t i = 1; i < wps.size(); ++i) {
      const double d = std::hypot(wps[i].x - wps[i - 1].x, wps[i].y - wps[i - 1].y);
      EXPECT_GE(d, 1.0 - 1e-12);
      EXPECT_LE(d, 2.0 + 1e-12);
    }
  }
}

TEST(SampleRandomWaypointsTest, FixedSeedIsDeterministic) {
  std::mt19937_64 a(42), b(42);
  const auto wa = SampleRandomWaypoints(a);
  const auto wb = SampleRandomWaypoints(b);
  for (std::size_t i = 0; i < wa.size(); ++i) {
    EXPECT_EQ(wa[i].x, wb[i].x);
    EXPECT_EQ(wa[i].y, wb[i].y);
  }
}

TEST(ProjectTest, OnSampleWithMatchingYawIsZero) {
  std::mt19937_64 rng(3);
  const ReferenceTrajectory t = GenerateSpline(SampleRandomWaypoints(rng));
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Projection p = Project(t, t[i].x, t[i].y, t[i].yaw);
    EXPECT_NEAR(p.e, 0.0, 1e-9);
    EXPECT_EQ(p.heading_error, 0.0);
  }
}

TEST(ProjectTest, StraightLineOffsetIsPositiveOnTheLeft) {
  const std::vector<Waypoint> wps{{0, 0}, {1, 0}, {2, 0}};
  const ReferenceTrajectory t = GenerateSpline(wps, 0.05);
  Projection p = Project(t, 0.5, 0.2, 0.0);
  EXPECT_NEAR(p.e, 0.2, 1e-12);
  EXPECT_NEAR(p.heading_error, 0.0, 1e-12);
  p = Project(t, 0.5, -0.2, 0.3);
  EXPECT_NEAR(p.e, -0.2, 1e-12);
  EXPECT_NEAR(p.heading_error, -0.3, 1e-12);
}

TEST(ProjectTest, MatchesExhaustiveSearchOnCurvedTrajectory) {
  std::mt19937_64 rng(11);
  const ReferenceTrajectory t = GenerateSpline(SampleRandomWaypoints(rng));
  std::uniform_real_distribution<double> off(-0.5, 0.5);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int k = 0; k < 500; ++k) {
    const std::size_t base = static_cast<std::size_t>(k) % t.size();
    const double x = t[base].x + off(rng);
    const double y = t[base].y + off(rng);
    const double yaw = ang(rng);
    const Projection p = Project(t, x, y, yaw);
    const std::size_t oracle = NearestSample(t, x, y);
    EXPECT_EQ(p.index, oracle);
    const double dist = std::hypot(t[oracle].x - x, t[oracle].y - y);
    EXPECT_LE(std::abs(p.e), dist + 1e-12);
    {
      const double lateral = -std::sin(t[oracle].yaw) * (x - t[oracle].x) +
                             std::cos(t[oracle].yaw) * (y - t[oracle].y);
      EXPECT_NEAR(p.e, lateral, 1e-12);
    }
    EXPECT_LE(std::abs(p.heading_error), kPi);
  }
}

TEST(ProjectTest, MirrorSymmetryNegatesErrors) {
  std::mt19937_64 rng(5);
  const std::vector<Waypoint> wps = SampleRandomWaypoints(rng);
  std::vector<Waypoint> mirrored;
  for (const Waypoint& w : wps) mirrored.push_back({w.x, -w.y});
  const ReferenceTrajectory t = GenerateSpline(wps);
  const ReferenceTrajectory m = GenerateSpline(mirrored);
  ASSERT_EQ(t.size(), m.size());
  std::uniform_real_distribution<double> off(-0.3, 0.3);
  for (std::size_t i = 0; i < t.size(); i += 7) {
    const double x = t[i].x + off(rng);
    const double y = t[i].y + off(rng);
    const double yaw = off(rng);
    const Projection a = Project(t, x, y, yaw);
    const Projection b = Project(m, x, -y, -yaw);
    EXPECT_NEAR(a.e, -b.e, 1e-9);
    EXPECT_NEAR(a.heading_error, -b.heading_error, 1e-9);
  }
}

TEST(TrajectoryCsvTest, RoundTripsToNineDigits) {
  std::mt19937_64 rng(8);
  const ReferenceTrajectory t = GenerateSpline(SampleRandomWaypoints(rng));
  std::stringstream buffer;
  WriteTrajectoryCsv(t, buffer);
  EXPECT_EQ(buffer.str().substr(0, 16), "s,x,y,yaw,v_ref\n");
  const ReferenceTrajectory back = ReadTrajectoryCsv(buffer);
  ASSERT_EQ(back.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(back[i].x, t[i].x, 1e-7);
    EXPECT_NEAR(back[i].yaw, t[i].yaw, 1e-7);
    EXPECT_NEAR(back[i].arclength, t[i].arclength, 1e-7);
    EXPECT_EQ(back[i].v_ref, 0.5);
  }
}

}  // namespace
}  // namespace slipgain
