// Copyright 2026 The cotdrive Authors
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

#include "cotdrive/world/collision.hpp"
#include "cotdrive/world/kinematics.hpp"
#include "cotdrive/world/queries.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace cotdrive
{
namespace
{

TEST(KinematicUpdate, StraightMotionWithoutInput)
{
  VehicleState s = test::box(0.0, 0.0, 0.0);
  s.speed = 10.0;
  const VehicleState n = kinematic_update(s, 0.0, 0.0, 0.1);
  EXPECT_DOUBLE_EQ(n.position.x, 1.0);
  EXPECT_DOUBLE_EQ(n.position.y, 0.0);
  EXPECT_DOUBLE_EQ(n.heading, 0.0);
  EXPECT_DOUBLE_EQ(n.speed, 10.0);
}

TEST(KinematicUpdate, FromRestUsesUpdatedSpeed)
{
  const VehicleState s = test::box(0.0, 0.0, 0.0);
  const VehicleState n = kinematic_update(s, 2.0, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(n.speed, 2.0);
  EXPECT_DOUBLE_EQ(n.position.x, 2.0);
}

TEST(KinematicUpdate, HeadingRateMatchesScalarEvaluation)
{
  VehicleState s = test::box(0.0, 0.0, 0.0);
  s.speed = 10.0;
  const VehicleState n = kinematic_update(s, 0.0, 0.1, 0.1);
  // (10 / 5) * tan(0.1) * 0.1, evaluated by hand
  EXPECT_NEAR(n.heading, 0.0200669, 1e-6);
}

TEST(KinematicUpdate, ClampsSpeedAndSteering)
{
  VehicleState s = test::box(0.0, 0.0, 0.0);
  s.speed = 1.0;
  EXPECT_DOUBLE_EQ(kinematic_update(s, -100.0, 0.0, 0.1).speed, 0.0);
  EXPECT_DOUBLE_EQ(kinematic_update(s, 100.0, 0.0, 0.1, 5.0).speed, 5.0);
  s.speed = 10.0;
  EXPECT_DOUBLE_EQ(
    kinematic_update(s, 0.0, 3.0, 0.1).heading, kinematic_update(s, 0.0, kSteerMax, 0.1).heading);
  EXPECT_THROW(kinematic_update(s, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST(KinematicUpdate, ZeroInputDisplacesAlongHeading)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> heading(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> speed(0.0, 30.0);
  for (int i = 0; i < 500; ++i) {
    VehicleState s = test::box(3.0, -2.0, heading(rng));
    s.speed = speed(rng);
    const VehicleState n = kinematic_update(s, 0.0, 0.0, kPhysicsDt);
    EXPECT_EQ(n.speed, s.speed);
    EXPECT_NEAR(n.position.x, s.position.x + s.speed * std::cos(s.heading) * kPhysicsDt, 1e-9);
    EXPECT_NEAR(n.position.y, s.position.y + s.speed * std::sin(s.heading) * kPhysicsDt, 1e-9);
  }
}

TEST(KinematicUpdate, HeadingStaysNormalized)
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> steer(-0.6, 0.6);
  std::uniform_real_distribution<double> accel(-4.0, 4.0);
  VehicleState s = test::box(0.0, 0.0, 3.0);
  s.speed = 15.0;
  for (int i = 0; i < 20000; ++i) {
    s = kinematic_update(s, accel(rng), steer(rng), kPhysicsDt, 30.0);
    ASSERT_GE(s.heading, -std::numbers::pi);
    ASSERT_LT(s.heading, std::numbers::pi);
    ASSERT_GE(s.speed, 0.0);
    ASSERT_LE(s.speed, 30.0);
  }
}

TEST(ObbOverlap, Examples)
{
  const VehicleState a = test::box(0.0, 0.0, 0.0);
  EXPECT_TRUE(obb_overlap(a, a));
  EXPECT_FALSE(obb_overlap(a, test::box(100.0, 0.0, 0.0)));
  EXPECT_TRUE(obb_overlap(a, test::box(4.9, 0.0, 0.0)));
  EXPECT_FALSE(obb_overlap(a, test::box(5.1, 0.0, 0.0)));
  // corner-to-corner diagonal miss that a circle test would flag
  EXPECT_FALSE(obb_overlap(a, test::box(5.5, 2.5, std::numbers::pi / 4.0)));
}

TEST(ObbOverlap, AgreesWithSamplingOracleAwayFromBoundary)
{
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> pos(-6.0, 6.0);
  std::uniform_real_distribution<double> heading(-std::numbers::pi, std::numbers::pi);
  int compared = 0;
  for (int i = 0; i < 1000; ++i) {
    const VehicleState a = test::box(0.0, 0.0, heading(rng));
    const VehicleState b = test::box(pos(rng), pos(rng), heading(rng));
    const double band = 0.02;
    // pairs whose answer flips inside the band are boundary cases
    if (!test::away_from_boundary(a, b, band)) {
      continue;
    }
    ++compared;
    EXPECT_EQ(obb_overlap(a, b), test::sampled_overlap(a, b)) << "pair " << i;
    EXPECT_EQ(obb_overlap(a, b), obb_overlap(b, a));
  }
  EXPECT_GT(compared, 900);
}

TEST(DetectCollisions, Examples)
{
  EXPECT_TRUE(detect_collisions({}).empty());
  std::vector<VehicleState> one{test::box(0.0, 0.0, 0.0)};
  EXPECT_TRUE(detect_collisions(one).empty());

  std::vector<VehicleState> three{
    test::box(0.0, 0.0, 0.0), test::box(4.0, 1.0, 0.3), test::box(20.0, 0.0, 0.0)};
  for (int i = 0; i < 3; ++i) {
    three[i].id = static_cast<VehicleId>(i + 10);
  }
  ASSERT_TRUE(test::sampled_overlap(three[0], three[1]));
  ASSERT_FALSE(test::sampled_overlap(three[0], three[2]));
  ASSERT_FALSE(test::sampled_overlap(three[1], three[2]));
  const auto pairs = detect_collisions(three);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(*pairs.begin(), (CollisionPair{10, 11}));
}

TEST(LeadGapAndTtc, Examples)
{
  World w = test::straight_road(2, 100.0, 10.0);
  test::add_car(w, 1, 0, 125.0, 5.0);  // bumper gap 20 m
  GapTtc g = lead_gap_and_ttc(w, 0);
  ASSERT_TRUE(g.gap.has_value());
  EXPECT_NEAR(*g.gap, 20.0, 1e-9);
  EXPECT_NEAR(g.ttc, 4.0, 1e-9);

  w.vehicles[1].speed = 12.0;
  g = lead_gap_and_ttc(w, 0);
  EXPECT_TRUE(std::isinf(g.ttc));

  World far = test::straight_road(2, 100.0, 10.0);
  test::add_car(far, 1, 0, 160.0, 0.0);
  test::add_car(far, 2, 1, 110.0, 0.0);  // other lane
  g = lead_gap_and_ttc(far, 0);
  EXPECT_FALSE(g.gap.has_value());
  EXPECT_TRUE(std::isinf(g.ttc));

  EXPECT_THROW(lead_gap_and_ttc(w, 42), std::exception);
}

TEST(LeadGapAndTtc, NeverNegative)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> s(0.0, 200.0);
  std::uniform_real_distribution<double> v(0.0, 30.0);
  for (int i = 0; i < 300; ++i) {
    World w = test::straight_road(1, 100.0, v(rng));
    test::add_car(w, 1, 0, s(rng), v(rng));
    const GapTtc g = lead_gap_and_ttc(w, 0);
    if (g.gap) {
      EXPECT_GE(*g.gap, 0.0);
    }
    EXPECT_GE(g.ttc, 0.0);
  }
}

TEST(RoadNetwork, NeighborRelationIsSymmetric)
{
  for (ScenarioKind kind : kAllScenarioKinds) {
    const World w = spawn_scenario(default_config(kind, 1));
    for (const auto & [id, lane] : w.road.lanes()) {
      if (auto l = w.road.left_of(id)) {
        EXPECT_EQ(w.road.right_of(*l), id);
      }
      if (auto r = w.road.right_of(id)) {
        EXPECT_EQ(w.road.left_of(*r), id);
      }
      const auto & pts = lane.centerline();
      for (std::size_t i = 1; i < pts.size(); ++i) {
        EXPECT_GT(distance(pts[i - 1], pts[i]), 0.0);
      }
      EXPECT_GT(lane.width(), 0.0);
    }
  }
}

TEST(RoadNetwork, RejectsBadLanesAndRelations)
{
  RoadNetwork road;
  road.add_lane(Lane(0, {{0.0, 0.0}, {10.0, 0.0}}, 4.0, 10.0));
  EXPECT_THROW(road.add_lane(Lane(0, {{0.0, 4.0}, {10.0, 4.0}}, 4.0, 10.0)), std::invalid_argument);
  EXPECT_THROW(road.set_neighbors(0, 7), std::invalid_argument);
  EXPECT_THROW(Lane(1, {{0.0, 0.0}, {0.0, 0.0}}, 4.0, 10.0), std::invalid_argument);
  EXPECT_THROW(Lane(1, {{0.0, 0.0}, {1.0, 0.0}}, 0.0, 10.0), std::invalid_argument);
}

TEST(RoadNetwork, CopiesAreIndependent)
{
  RoadNetwork a;
  a.add_lane(Lane(0, {{0.0, 0.0}, {10.0, 0.0}}, 4.0, 10.0));
  RoadNetwork b = a;
  b.add_lane(Lane(1, {{0.0, 4.0}, {10.0, 4.0}}, 4.0, 10.0));
  b.set_neighbors(0, 1);
  EXPECT_FALSE(a.has_lane(1));
  EXPECT_FALSE(a.left_of(0).has_value());
  EXPECT_EQ(b.left_of(0), 1);
}

}  // namespace
}  // namespace cotdrive
