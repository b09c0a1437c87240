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

#ifndef COTDRIVE__SIM__STEP_HPP_
#define COTDRIVE__SIM__STEP_HPP_

#include "cotdrive/sim/idm.hpp"
#include "cotdrive/world/kinematics.hpp"
#include "cotdrive/world/queries.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cotdrive
{

/// Ego longitudinal tracking gain [1/s] and acceleration bound [m/s^2].
inline constexpr double kEgoSpeedGain = 1.0;
inline constexpr double kEgoAccelLimit = 3.0;
/// Rate of the inner heading loop [1/s] and the lateral-offset gain of the outer loop.
inline constexpr double kHeadingRate = 6.0;
inline constexpr double kLateralGain = 1.0;
inline constexpr double kLateralSoftSpeed = 4.0;
/// Leader search range for car following [m].
inline constexpr double kFollowRange = 200.0;

/// How background vehicles are propagated.
enum class BackgroundModel {
  idm,             // car following
  constant_speed,  // prediction model used by planners
};

namespace detail
{

/// Point at arc length s measured from the start of `lane`, continuing through
/// the successors the vehicle would take.
inline Vec2 path_point(const World & world, const VehicleState & v, LaneId lane, double s)
{
  LaneId current = lane;
  for (int hops = 0; hops < 8; ++hops) {
    const Lane & l = world.road.lane(current);
    if (s <= l.length()) {
      return l.point_at(s);
    }
    const auto next = next_lane(world, v, current);
    if (!next) {
      return l.point_at(s);
    }
    s -= l.length();
    current = *next;
  }
  return world.road.lane(current).point_at(s);
}

/// Steering command that tracks the centerline of `lane`: curvature
/// feed-forward plus an inner heading loop toward a heading that decays the
/// lateral offset.
inline double lane_keeping_steer(const World & world, const VehicleState & v, LaneId lane)
{
  const Lane & target = world.road.lane(lane);
  const LaneProjection proj = target.project(v.position);
  const Vec2 p0 = path_point(world, v, lane, proj.s - 3.0);
  const Vec2 p1 = path_point(world, v, lane, proj.s);
  const Vec2 p2 = path_point(world, v, lane, proj.s + 3.0);
  const Vec2 tangent = p2 - p0;
  const double lane_heading = std::atan2(tangent.y, tangent.x);
  const double denom = norm(p1 - p0) * norm(p2 - p1) * norm(p2 - p0);
  const double curvature = denom > 1e-9 ? 2.0 * cross(p1 - p0, p2 - p0) / denom : 0.0;

  const double heading_error = normalize_angle(v.heading - lane_heading);
  const double desired_error =
    -std::atan(kLateralGain * proj.lateral / std::max(v.speed, kLateralSoftSpeed));
  const double inner_gain = kHeadingRate * v.length / std::max(v.speed, 0.5);
  const double steer =
    std::atan(v.length * curvature) + inner_gain * (desired_error - heading_error);
  return std::clamp(steer, -kSteerMax, kSteerMax);
}

inline void update_lane_ref(World & world, VehicleState & v)
{
  LaneId lane = v.lane_ref.lane;
  LaneProjection proj = world.road.lane(lane).project(v.position);
  for (int hops = 0; hops < 8 && proj.s > world.road.lane(lane).length(); ++hops) {
    const auto next = next_lane(world, v, lane);
    if (!next) {
      break;
    }
    if (v.kind == VehicleKind::ego && world.ego_target_lane == lane) {
      world.ego_target_lane = *next;
    }
    lane = *next;
    proj = world.road.lane(lane).project(v.position);
  }
  if (v.kind == VehicleKind::ego && world.ego_target_lane != lane) {
    const LaneProjection to_target = world.road.lane(world.ego_target_lane).project(v.position);
    if (std::abs(to_target.lateral) < std::abs(proj.lateral)) {
      lane = world.ego_target_lane;
      proj = to_target;
    }
  }
  v.lane_ref = {lane, proj.s};
}

}  // namespace detail

/// Advances every vehicle by one physics step.
///
/// Controls are computed from the pre-step state for all vehicles, then all
/// states advance together. The ego tracks its target speed and target lane;
/// background vehicles keep their lane and either follow IDM or hold speed.
inline World step(const World & world, double dt, BackgroundModel model = BackgroundModel::idm,
                  const IdmParams & idm = {})
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("step: dt must be positive");
  }
  World next = world;
  const std::size_t n = world.vehicles.size();
  std::vector<double> accel(n, 0.0);
  std::vector<double> steer(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const VehicleState & v = world.vehicles[i];
    if (v.kind == VehicleKind::ego) {
      accel[i] = std::clamp(
        kEgoSpeedGain * (world.ego_target_speed - v.speed), -kEgoAccelLimit, kEgoAccelLimit);
      steer[i] = detail::lane_keeping_steer(world, v, world.ego_target_lane);
    } else {
      if (model == BackgroundModel::idm) {
        const auto leader = find_leader(world, i, kFollowRange);
        if (leader) {
          const VehicleState & lead = world.vehicles[leader->index];
          accel[i] = idm_acceleration(
            v.speed, v.desired_speed, bumper_gap(v, lead, leader->along), v.speed - lead.speed, idm);
        } else {
          accel[i] = idm_acceleration(v.speed, v.desired_speed, std::nullopt, 0.0, idm);
        }
      }
      steer[i] = detail::lane_keeping_steer(world, v, v.lane_ref.lane);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    next.vehicles[i] = kinematic_update(world.vehicles[i], accel[i], steer[i], dt, world.speed_cap);
  }
  for (auto & v : next.vehicles) {
    detail::update_lane_ref(next, v);
  }
  next.sim_time = world.sim_time + dt;
  return next;
}

}  // namespace cotdrive

#endif  // COTDRIVE__SIM__STEP_HPP_
