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

#include "cotdrive/sim/idm.hpp"
#include "cotdrive/sim/meta_action.hpp"
#include "cotdrive/sim/scenario.hpp"
#include "cotdrive/sim/serialize.hpp"
#include "cotdrive/sim/step.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

namespace cotdrive
{
namespace
{

TEST(Idm, Examples)
{
  EXPECT_NEAR(idm_acceleration(15.0, 15.0, std::nullopt, 0.0), 0.0, 1e-12);
  EXPECT_NEAR(idm_acceleration(0.0, 10.0, std::nullopt, 0.0), 1.5, 1e-12);
  // s* = 2 + 10 * 1.5 = 17; 1.5 * (1 - (10/15)^4 - (17/20)^2)
  const double expected = 1.5 * (1.0 - 16.0 / 81.0 - 0.7225);
  EXPECT_NEAR(idm_acceleration(10.0, 15.0, 20.0, 0.0), expected, 1e-12);
  EXPECT_NEAR(idm_acceleration(10.0, 15.0, 20.0, 0.0), 0.120, 5e-4);
}

TEST(Idm, BrakesHarderWhenClosing)
{
  EXPECT_LT(idm_acceleration(10.0, 15.0, 20.0, 5.0), idm_acceleration(10.0, 15.0, 20.0, 0.0));
  EXPECT_LT(idm_acceleration(10.0, 15.0, 10.0, 0.0), idm_acceleration(10.0, 15.0, 20.0, 0.0));
}

TEST(IdmPlatoon, GapsStayPositiveWhileLeaderBrakes)
{
  EXPECT_GT(test::idm_platoon_min_gap(), 0.0);
}

TEST(IdmPlatoon, TwoVehiclesThroughStep)
{
  World w = test::straight_road(1, 20.0, 0.0, 0, 30.0, 100000.0);
  test::add_car(w, 1, 0, 300.0, 20.0);
  test::add_car(w, 2, 0, 265.0, 20.0);
  w.vehicles[1].desired_speed = 0.0;  // the leader wants to stop: IDM brakes it
  double min_gap = 1e9;
  for (int k = 0; k < 10000; ++k) {
    w = step(w, kPhysicsDt);
    min_gap = std::min(min_gap, w.vehicles[1].position.x - w.vehicles[2].position.x - 5.0);
  }
  EXPECT_GT(min_gap, 0.0);
}

TEST(ApplyMetaAction, Examples)
{
  World w = test::straight_road(3, 100.0, 20.0, 2);
  const World idle = apply_meta_action(w, MetaAction::idle);
  EXPECT_EQ(idle.ego_target_speed, w.ego_target_speed);
  EXPECT_EQ(idle.ego_target_lane, w.ego_target_lane);
  EXPECT_EQ(idle.vehicles.size(), w.vehicles.size());
  EXPECT_FALSE(idle.last_action_noop);

  w.ego_target_speed = w.speed_cap;
  EXPECT_EQ(apply_meta_action(w, MetaAction::faster).ego_target_speed, w.speed_cap);
  EXPECT_EQ(apply_meta_action(w, MetaAction::slower).ego_target_speed, w.speed_cap - 2.5);

  const World left = apply_meta_action(w, MetaAction::lane_left);
  EXPECT_EQ(left.ego_target_lane, 2);
  EXPECT_TRUE(left.last_action_noop);
  EXPECT_TRUE(left.last_action_offnetwork);

  const World right = apply_meta_action(w, MetaAction::lane_right);
  EXPECT_EQ(right.ego_target_lane, 1);
  EXPECT_FALSE(right.last_action_noop);

  w.ego_target_speed = 1.0;
  EXPECT_EQ(apply_meta_action(w, MetaAction::slower).ego_target_speed, 0.0);
}

TEST(ApplyMetaAction, NeverTargetsAnUnknownLane)
{
  for (ScenarioKind kind : kAllScenarioKinds) {
    World w = spawn_scenario(default_config(kind, 3));
    for (int k = 0; k < 40; ++k) {
      w = apply_meta_action(w, kAllMetaActions[static_cast<std::size_t>(k * 7 % 5)]);
      ASSERT_TRUE(w.road.has_lane(w.ego_target_lane));
      for (int i = 0; i < 15; ++i) {
        w = step(w, kPhysicsDt);
      }
    }
  }
}

TEST(SpawnScenario, DeterministicPerSeed)
{
  for (ScenarioKind kind : kAllScenarioKinds) {
    const auto a = to_json(spawn_scenario(default_config(kind, 99))).dump();
    const auto b = to_json(spawn_scenario(default_config(kind, 99))).dump();
    const auto c = to_json(spawn_scenario(default_config(kind, 100))).dump();
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
  }
}

TEST(SpawnScenario, EmptyTraffic)
{
  for (ScenarioKind kind : kAllScenarioKinds) {
    ScenarioConfig c = default_config(kind, 1);
    c.n_background = 0;
    const World w = spawn_scenario(c);
    ASSERT_EQ(w.vehicles.size(), 1u);
    EXPECT_EQ(w.vehicles[0].kind, VehicleKind::ego);
  }
}

TEST(SpawnScenario, HighwayGapsAndNoOverlap)
{
  ScenarioConfig c = default_config(ScenarioKind::highway, 7);
  c.n_background = 10;
  const World w = spawn_scenario(c);
  ASSERT_EQ(w.vehicles.size(), 11u);
  EXPECT_TRUE(detect_collisions(w.vehicles).empty());
  // straight lanes along x: same-lane gap is the x distance minus one length
  for (std::size_t i = 0; i < w.vehicles.size(); ++i) {
    for (std::size_t j = i + 1; j < w.vehicles.size(); ++j) {
      const auto & a = w.vehicles[i];
      const auto & b = w.vehicles[j];
      if (a.lane_ref.lane == b.lane_ref.lane) {
        EXPECT_GE(std::abs(a.position.x - b.position.x) - 5.0, 7.0 - 1e-9);
      }
    }
  }
}

TEST(SpawnScenario, RejectsImpossibleDensity)
{
  ScenarioConfig c = default_config(ScenarioKind::roundabout, 1);
  c.n_background = 500;
  EXPECT_THROW(spawn_scenario(c), SpawnError);
  c.n_background = -1;
  EXPECT_THROW(spawn_scenario(c), std::invalid_argument);
}

TEST(SpawnScenario, Layouts)
{
  const World hw = spawn_scenario(default_config(ScenarioKind::highway, 1));
  EXPECT_EQ(hw.road.lanes().size(), 4u);
  const World ix = spawn_scenario(default_config(ScenarioKind::intersection, 1));
  EXPECT_EQ(ix.road.conflicts().size(), 4u);
  const World mg = spawn_scenario(default_config(ScenarioKind::merge, 1));
  const Lane & ramp = mg.road.lane(layout::kRamp);
  EXPECT_NEAR(ramp.point_at(ramp.change_zone().first).x, layout::kMergeAreaBegin, 1e-6);
  EXPECT_NEAR(ramp.point_at(ramp.length()).x, layout::kMergeAreaEnd, 1e-6);
  const World rb = spawn_scenario(default_config(ScenarioKind::roundabout, 1));
  EXPECT_EQ(rb.ego_route.size(), 4u);
}

TEST(Step, StationaryEgoIsAFixedPoint)
{
  World w = test::straight_road(2, 100.0, 0.0);
  w.ego_target_speed = 0.0;
  const World n = step(w, kPhysicsDt);
  EXPECT_EQ(n.vehicles[0].position, w.vehicles[0].position);
  EXPECT_EQ(n.vehicles[0].heading, w.vehicles[0].heading);
  EXPECT_EQ(n.vehicles[0].speed, 0.0);
  EXPECT_DOUBLE_EQ(n.sim_time, kPhysicsDt);
}

TEST(Step, LaneChangeOffsetShrinksMonotonically)
{
  World w = test::straight_road(2, 100.0, 20.0, 1);
  w = apply_meta_action(w, MetaAction::lane_right);
  ASSERT_EQ(w.ego_target_lane, 0);
  const double start = std::abs(w.road.lane(0).project(w.ego().position).lateral);
  // position advances along the old heading, so the first step only turns the car
  w = step(w, kPhysicsDt);
  double prev = std::abs(w.road.lane(0).project(w.ego().position).lateral);
  EXPECT_DOUBLE_EQ(prev, start);
  EXPECT_GT(std::abs(w.ego().heading), 0.0);
  int steps = 1;
  while (prev >= 0.1) {
    w = step(w, kPhysicsDt);
    const double off = std::abs(w.road.lane(0).project(w.ego().position).lateral);
    ASSERT_LT(off, prev) << "step " << steps;
    prev = off;
    ASSERT_LT(++steps, 300);
  }
  EXPECT_EQ(w.ego().lane_ref.lane, 0);
}

TEST(Step, EgoTracksTargetSpeedWithBoundedAcceleration)
{
  World w = test::straight_road(1, 100.0, 10.0);
  w.ego_target_speed = 20.0;
  World n = step(w, kPhysicsDt);
  EXPECT_NEAR(n.ego().speed, 10.0 + 3.0 * kPhysicsDt, 1e-12);
  w.ego_target_speed = 10.5;
  n = step(w, kPhysicsDt);
  EXPECT_NEAR(n.ego().speed, 10.0 + 0.5 * kPhysicsDt, 1e-12);
}

TEST(Step, BackgroundTrafficAloneNeverCollidesOrChangesLane)
{
  for (ScenarioKind kind : kAllScenarioKinds) {
    World w = spawn_scenario(default_config(kind, 4));
    // park the ego well away from the network so only background traffic interacts
    w.ego().position = {-5000.0, -5000.0};
    w.ego().speed = 0.0;
    w.ego_target_speed = 0.0;
    std::map<VehicleId, LaneId> lane_of;
    for (const auto & v : w.vehicles) {
      lane_of[v.id] = v.lane_ref.lane;
    }
    for (int k = 0; k < 10000; ++k) {
      w = step(w, kPhysicsDt);
      for (const auto & [a, b] : detect_collisions(w.vehicles)) {
        ADD_FAILURE() << to_string(kind) << " step " << k << ": " << a << " hits " << b;
      }
      for (const auto & v : w.vehicles) {
        if (v.kind == VehicleKind::ego) {
          continue;
        }
        const LaneId before = lane_of[v.id];
        if (v.lane_ref.lane != before) {
          ASSERT_NE(w.road.left_of(before), v.lane_ref.lane);
          ASSERT_NE(w.road.right_of(before), v.lane_ref.lane);
          lane_of[v.id] = v.lane_ref.lane;
        }
      }
      if (::testing::Test::HasFailure()) {
        return;
      }
    }
  }
}

TEST(Step, DeterministicTrajectories)
{
  World a = spawn_scenario(default_config(ScenarioKind::roundabout, 8));
  World b = spawn_scenario(default_config(ScenarioKind::roundabout, 8));
  const MetaAction seq[] = {MetaAction::faster, MetaAction::idle, MetaAction::slower, MetaAction::faster};
  for (int d = 0; d < 12; ++d) {
    a = apply_meta_action(a, seq[d % 4]);
    b = apply_meta_action(b, seq[d % 4]);
    for (int k = 0; k < 15; ++k) {
      a = step(a, kPhysicsDt);
      b = step(b, kPhysicsDt);
    }
    ASSERT_EQ(to_json(a).dump(), to_json(b).dump());
  }
}

TEST(EpisodeStatus, Examples)
{
  const ScenarioConfig c = default_config(ScenarioKind::highway, 2);
  World w = spawn_scenario(c);
  EXPECT_EQ(episode_status(w, c), EpisodeStatus::running);

  World crash = w;
  test::add_car(crash, 99, crash.ego().lane_ref.lane, crash.ego().lane_ref.s + 2.0, 0.0);
  EXPECT_EQ(episode_status(crash, c), EpisodeStatus::collision);

  World late = w;
  late.sim_time = c.max_sim_time;
  EXPECT_EQ(episode_status(late, c), EpisodeStatus::timeout);

  World done = test::straight_road(2, 1001.0, 20.0);
  EXPECT_EQ(episode_status(done, c), EpisodeStatus::success);
}

TEST(EpisodeStatus, CollisionReportedAtFirstOverlappingStep)
{
  World w = test::straight_road(1, 100.0, 20.0);
  test::add_car(w, 1, 0, 140.0, 0.0);
  w.vehicles[1].desired_speed = 0.0;
  const ScenarioConfig c = default_config(ScenarioKind::highway, 0);
  for (int k = 0; k < 200; ++k) {
    const bool overlap = !detect_collisions(w.vehicles).empty();
    ASSERT_EQ(episode_status(w, c) == EpisodeStatus::collision, overlap);
    if (overlap) {
      return;
    }
    w = step(w, kPhysicsDt);
  }
  FAIL() << "the ego never reached the stopped car";
}

TEST(ScenarioConfigJson, RoundTripsAndRejectsUnknownValues)
{
  ScenarioConfig c = default_config(ScenarioKind::merge, 5);
  c.condition_flags.insert(Condition::wet);
  const ScenarioConfig back = scenario_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_THROW(scenario_config_from_json({{"kind", "desert"}}), ConfigError);
  EXPECT_THROW(
    scenario_config_from_json({{"kind", "highway"}, {"condition_flags", {"fog"}}}), ConfigError);
  EXPECT_THROW(scenario_config_from_json({{"kind", "highway"}, {"speed_cap", 0.0}}), ConfigError);
}

}  // namespace
}  // namespace cotdrive
