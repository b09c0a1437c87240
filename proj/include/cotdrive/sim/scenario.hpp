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

#ifndef COTDRIVE__SIM__SCENARIO_HPP_
#define COTDRIVE__SIM__SCENARIO_HPP_

#include "cotdrive/world/collision.hpp"
#include "cotdrive/world/queries.hpp"
#include "cotdrive/world/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cotdrive
{

struct ScenarioConfig
{
  ScenarioKind kind{ScenarioKind::highway};
  int n_background{0};
  std::uint64_t seed{0};
  double max_sim_time{60.0};
  double speed_cap{30.0};
  ConditionFlags condition_flags;

  void validate() const
  {
    if (n_background < 0) {
      throw std::invalid_argument("n_background must be >= 0");
    }
    if (!(max_sim_time > 0.0)) {
      throw std::invalid_argument("max_sim_time must be positive");
    }
    if (!(speed_cap > 0.0)) {
      throw std::invalid_argument("speed_cap must be positive");
    }
  }
};

class SpawnError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Minimum initial bumper-to-bumper gap between same-lane vehicles [m].
inline constexpr double kMinSpawnGap = 7.0;

/// Default densities and limits per scenario kind.
inline ScenarioConfig default_config(ScenarioKind kind, std::uint64_t seed = 0)
{
  ScenarioConfig c;
  c.kind = kind;
  c.seed = seed;
  switch (kind) {
    case ScenarioKind::highway:
      c.n_background = 12;
      c.max_sim_time = 80.0;
      c.speed_cap = 30.0;
      break;
    case ScenarioKind::intersection:
      c.n_background = 8;
      c.max_sim_time = 60.0;
      c.speed_cap = 15.0;
      break;
    case ScenarioKind::roundabout:
      c.n_background = 5;
      c.max_sim_time = 60.0;
      c.speed_cap = 12.0;
      break;
    case ScenarioKind::merge:
      c.n_background = 8;
      c.max_sim_time = 60.0;
      c.speed_cap = 25.0;
      break;
  }
  return c;
}

namespace layout
{

inline constexpr double kLaneWidth = 4.0;

// highway
inline constexpr int kHighwayLanes = 4;
inline constexpr double kHighwayLength = 1500.0;
inline constexpr double kHighwayGoal = 1000.0;

// intersection: north-, south-, east-, westbound lanes
inline constexpr LaneId kNorthbound = 0;
inline constexpr LaneId kSouthbound = 1;
inline constexpr LaneId kEastbound = 2;
inline constexpr LaneId kWestbound = 3;
inline constexpr double kArmLength = 150.0;

// roundabout
inline constexpr double kRingRadius = 20.0;
inline constexpr LaneId kFirstEntry = 4;
inline constexpr LaneId kFirstExit = 8;
inline constexpr double kFilletRadius = 15.0;
inline constexpr double kApproachLength = 50.0;

// merge
inline constexpr LaneId kMainRight = 0;
inline constexpr LaneId kMainLeft = 1;
inline constexpr LaneId kRamp = 2;
inline constexpr double kMergeAreaBegin = 200.0;
inline constexpr double kMergeAreaEnd = 300.0;

inline std::vector<Vec2> straight(Vec2 a, Vec2 b) { return {a, b}; }

inline std::vector<Vec2> arc(Vec2 center, double radius, double from, double to, int n_seg)
{
  std::vector<Vec2> pts;
  for (int i = 0; i <= n_seg; ++i) {
    const double a = from + (to - from) * i / n_seg;
    pts.push_back(center + unit_from_heading(a) * radius);
  }
  return pts;
}

/// Approach that ends at `junction` with heading `heading` after a right-hand
/// fillet of `turn` radians.
inline std::vector<Vec2> entry_path(Vec2 junction, double heading, double turn)
{
  const Vec2 right{std::sin(heading), -std::cos(heading)};
  const Vec2 c = junction + right * kFilletRadius;
  auto on_fillet = [&](double phi) {
    const double h = heading + phi;
    return c - Vec2{std::sin(h), -std::cos(h)} * kFilletRadius;
  };
  const Vec2 fillet_start = on_fillet(turn);
  std::vector<Vec2> pts{fillet_start - unit_from_heading(heading + turn) * kApproachLength};
  constexpr int n = 9;
  for (int i = 0; i <= n; ++i) {
    pts.push_back(on_fillet(turn * (n - i) / n));
  }
  return pts;
}

/// Departure that starts at `junction` with heading `heading` and turns right by `turn`.
inline std::vector<Vec2> exit_path(Vec2 junction, double heading, double turn)
{
  const Vec2 right{std::sin(heading), -std::cos(heading)};
  const Vec2 c = junction + right * kFilletRadius;
  std::vector<Vec2> pts;
  constexpr int n = 9;
  for (int i = 0; i <= n; ++i) {
    const double h = heading - turn * i / n;
    pts.push_back(c - Vec2{std::sin(h), -std::cos(h)} * kFilletRadius);
  }
  pts.push_back(pts.back() + unit_from_heading(heading - turn) * kApproachLength);
  return pts;
}

}  // namespace layout

namespace detail
{

inline VehicleState place_on_lane(
  const RoadNetwork & road, VehicleId id, LaneId lane, double s, double speed, VehicleKind kind)
{
  const Lane & l = road.lane(lane);
  VehicleState v;
  v.id = id;
  v.kind = kind;
  v.position = l.point_at(s);
  const Vec2 t = l.point_at(s + 0.5) - l.point_at(s - 0.5);
  v.heading = normalize_angle(std::atan2(t.y, t.x));
  v.speed = speed;
  v.desired_speed = speed;
  v.lane_ref = {lane, l.project(v.position).s};
  return v;
}

/// Rejection-samples background vehicles; `sample` draws (lane, s, speed).
template <typename Sample>
void populate(World & world, int count, Sample && sample)
{
  constexpr int kAttempts = 2000;
  VehicleId next_id = 1;
  for (int k = 0; k < count; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kAttempts && !placed; ++attempt) {
      const auto [lane, s, speed] = sample(world.rng);
      VehicleState cand =
        place_on_lane(world.road, next_id, lane, s, speed, VehicleKind::background);
      bool ok = true;
      for (const auto & other : world.vehicles) {
        if (obb_overlap(cand, other)) {
          ok = false;
          break;
        }
        const auto ahead = along_path_distance(world, cand, other, 1e4);
        const auto behind = along_path_distance(world, other, cand, 1e4);
        const auto gap_to = [&](std::optional<double> along) {
          return along && bumper_gap(cand, other, *along) < kMinSpawnGap;
        };
        if (gap_to(ahead) || gap_to(behind)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        world.vehicles.push_back(cand);
        ++next_id;
        placed = true;
      }
    }
    if (!placed) {
      throw SpawnError(
        "cannot place " + std::to_string(count) + " background vehicles in " +
        std::string(to_string(world.kind)) + " without violating the " +
        std::to_string(kMinSpawnGap) + " m gap");
    }
  }
}

struct Draw
{
  LaneId lane;
  double s;
  double speed;
};

inline void build_highway(World & w, int n_background)
{
  using namespace layout;
  for (LaneId i = 0; i < kHighwayLanes; ++i) {
    const double y = kLaneWidth * i;
    w.road.add_lane(Lane(i, straight({0.0, y}, {kHighwayLength, y}), kLaneWidth, w.speed_cap));
  }
  for (LaneId i = 0; i + 1 < kHighwayLanes; ++i) {
    w.road.set_neighbors(i, i + 1);
  }
  const double ego_speed = std::min(20.0, w.speed_cap);
  w.vehicles.push_back(place_on_lane(w.road, 0, 1, 50.0, ego_speed, VehicleKind::ego));
  w.ego_target_lane = 1;
  w.ego_route = {1};
  w.goal = {{0, 1, 2, 3}, kHighwayGoal, std::numeric_limits<double>::infinity()};
  const double cap = w.speed_cap;
  populate(w, n_background, [cap](Rng & rng) {
    const auto lane = static_cast<LaneId>(rng.index(kHighwayLanes));
    const double s = rng.uniform(0.0, 450.0);
    const double speed = std::min(cap, rng.uniform(18.0, 26.0));
    return Draw{lane, s, speed};
  });
}

inline void build_intersection(World & w, int n_background)
{
  using namespace layout;
  const double h = 0.5 * kLaneWidth;
  const double a = kArmLength;
  w.road.add_lane(Lane(kNorthbound, straight({h, -a}, {h, a}), kLaneWidth, w.speed_cap));
  w.road.add_lane(Lane(kSouthbound, straight({-h, a}, {-h, -a}), kLaneWidth, w.speed_cap));
  w.road.add_lane(Lane(kEastbound, straight({-a, -h}, {a, -h}), kLaneWidth, w.speed_cap));
  w.road.add_lane(Lane(kWestbound, straight({a, h}, {-a, h}), kLaneWidth, w.speed_cap));

  // A vehicle's center is in conflict while within half a lane width plus
  // half a vehicle length of the crossing centerline.
  const double reach = h + 2.5;
  auto span = [reach](LaneId lane, double s_cross) {
    return LaneSpan{lane, s_cross - reach, s_cross + reach};
  };
  const auto s_on = [&](LaneId lane, Vec2 p) { return w.road.lane(lane).project(p).s; };
  int zone_id = 0;
  for (LaneId ns : {kNorthbound, kSouthbound}) {
    for (LaneId ew : {kEastbound, kWestbound}) {
      const double x = (ns == kNorthbound) ? h : -h;
      const double y = (ew == kEastbound) ? -h : h;
      w.road.add_conflict({zone_id++, span(ns, s_on(ns, {x, y})), span(ew, s_on(ew, {x, y}))});
    }
  }

  const double ego_speed = std::min(8.0, w.speed_cap);
  w.vehicles.push_back(
    place_on_lane(w.road, 0, kNorthbound, a - 45.0, ego_speed, VehicleKind::ego));
  w.ego_target_lane = kNorthbound;
  w.ego_route = {kNorthbound};
  w.goal = {{kNorthbound}, a + kLaneWidth + 2.5, std::numeric_limits<double>::infinity()};
  const double cap = w.speed_cap;
  populate(w, n_background, [cap](Rng & rng) {
    const LaneId lane = rng.index(2) == 0 ? kEastbound : kWestbound;
    const double s = rng.uniform(10.0, 140.0);
    const double speed = std::min(cap, rng.uniform(8.0, 11.0));
    return Draw{lane, s, speed};
  });
}

inline void build_roundabout(World & w, int n_background)
{
  using namespace layout;
  constexpr double quarter = std::numbers::pi / 2.0;
  const Vec2 center{0.0, 0.0};
  const double ring_limit = std::min(w.speed_cap, 10.0);
  for (LaneId i = 0; i < 4; ++i) {
    const double from = -quarter + quarter * i;
    w.road.add_lane(Lane(i, arc(center, kRingRadius, from, from + quarter, 18), kLaneWidth, ring_limit));
  }
  for (LaneId i = 0; i < 4; ++i) {
    const double angle = -quarter + quarter * i;
    const Vec2 junction = center + unit_from_heading(angle) * kRingRadius;
    const double tangent = angle + quarter;
    w.road.add_lane(Lane(
      kFirstEntry + i, entry_path(junction, tangent, quarter / 2.0), kLaneWidth, ring_limit));
    w.road.add_lane(Lane(
      kFirstExit + i, exit_path(junction, tangent, quarter / 2.0), kLaneWidth, ring_limit));
  }
  for (LaneId i = 0; i < 4; ++i) {
    w.road.mutable_lane(i).add_successor((i + 1) % 4);
    w.road.mutable_lane(i).add_successor(kFirstExit + (i + 1) % 4);
    w.road.mutable_lane(kFirstEntry + i).add_successor(i);
  }
  // Entering traffic merges with circulating traffic at each junction. Both
  // spans sit on the downstream arc; negative bounds reach back along the
  // entry or the upstream arc.
  for (LaneId i = 0; i < 4; ++i) {
    w.road.add_conflict({static_cast<int>(i), LaneSpan{i, -7.0, 6.0}, LaneSpan{i, -7.0, 6.0}});
  }

  const LaneId entry = kFirstEntry + 0;
  const LaneId exit = kFirstExit + 2;
  const double entry_len = w.road.lane(entry).length();
  const double ego_speed = std::min(6.0, w.speed_cap);
  w.vehicles.push_back(place_on_lane(w.road, 0, entry, entry_len - 35.0, ego_speed, VehicleKind::ego));
  w.ego_target_lane = entry;
  w.ego_route = {entry, 0, 1, exit};
  w.goal = {{exit}, 8.0, std::numeric_limits<double>::infinity()};
  const double arc_len = w.road.lane(0).length();
  populate(w, n_background, [arc_len, ring_limit](Rng & rng) {
    const auto lane = static_cast<LaneId>(rng.index(4));
    const double s = rng.uniform(0.0, arc_len);
    const double speed = std::min(ring_limit, rng.uniform(6.0, 9.0));
    return Draw{lane, s, speed};
  });
}

inline void build_merge(World & w, int n_background)
{
  using namespace layout;
  constexpr double length = 700.0;
  w.road.add_lane(Lane(kMainRight, straight({0.0, 0.0}, {length, 0.0}), kLaneWidth, w.speed_cap));
  w.road.add_lane(
    Lane(kMainLeft, straight({0.0, kLaneWidth}, {length, kLaneWidth}), kLaneWidth, w.speed_cap));
  w.road.add_lane(Lane(
    kRamp, {{0.0, -20.0}, {140.0, -20.0}, {kMergeAreaBegin, -kLaneWidth}, {kMergeAreaEnd, -kLaneWidth}},
    kLaneWidth, w.speed_cap));
  w.road.set_neighbors(kMainRight, kMainLeft);
  w.road.set_neighbors(kRamp, kMainRight);
  Lane & ramp = w.road.mutable_lane(kRamp);
  ramp.set_change_zone(ramp.project({kMergeAreaBegin, -kLaneWidth}).s, ramp.length());
  w.road.mutable_lane(kMainRight).set_change_zone(0.0, length);

  const double ego_speed = std::min(14.0, w.speed_cap);
  w.vehicles.push_back(place_on_lane(w.road, 0, kRamp, 40.0, ego_speed, VehicleKind::ego));
  w.ego_target_lane = kRamp;
  w.ego_route = {kRamp};
  w.goal = {{kMainRight, kMainLeft}, kMergeAreaEnd, 0.5};
  const double cap = w.speed_cap;
  populate(w, n_background, [cap](Rng & rng) {
    const LaneId lane = rng.index(2) == 0 ? kMainRight : kMainLeft;
    const double s = rng.uniform(0.0, 350.0);
    const double speed = std::min(cap, rng.uniform(13.0, 18.0));
    return Draw{lane, s, speed};
  });
}

}  // namespace detail

/// Builds the initial world for a scenario. Deterministic in the config.
inline World spawn_scenario(const ScenarioConfig & config)
{
  config.validate();
  World w;
  w.kind = config.kind;
  w.speed_cap = config.speed_cap;
  w.conditions = config.condition_flags;
  w.rng = Rng(config.seed);
  switch (config.kind) {
    case ScenarioKind::highway:
      detail::build_highway(w, config.n_background);
      break;
    case ScenarioKind::intersection:
      detail::build_intersection(w, config.n_background);
      break;
    case ScenarioKind::roundabout:
      detail::build_roundabout(w, config.n_background);
      break;
    case ScenarioKind::merge:
      detail::build_merge(w, config.n_background);
      break;
  }
  w.ego_target_speed = w.ego().speed;
  return w;
}

enum class EpisodeStatus { running, success, collision, timeout };

inline bool ego_in_goal(const World & world)
{
  const VehicleState & ego = world.ego();
  const auto & lanes = world.goal.lanes;
  if (std::find(lanes.begin(), lanes.end(), ego.lane_ref.lane) == lanes.end()) {
    return false;
  }
  const LaneProjection p = world.road.lane(ego.lane_ref.lane).project(ego.position);
  return p.s >= world.goal.s_min && std::abs(p.lateral) <= world.goal.max_lateral;
}

inline bool ego_collides(const World & world)
{
  const VehicleState & ego = world.ego();
  for (const auto & v : world.vehicles) {
    if (v.id != ego.id && obb_overlap(ego, v)) {
      return true;
    }
  }
  return false;
}

inline EpisodeStatus episode_status(const World & world, const ScenarioConfig & config)
{
  if (ego_collides(world)) {
    return EpisodeStatus::collision;
  }
  if (ego_in_goal(world)) {
    return EpisodeStatus::success;
  }
  if (world.sim_time >= config.max_sim_time - 1e-9) {
    return EpisodeStatus::timeout;
  }
  return EpisodeStatus::running;
}

}  // namespace cotdrive

#endif  // COTDRIVE__SIM__SCENARIO_HPP_
