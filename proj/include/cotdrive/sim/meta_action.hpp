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

#ifndef COTDRIVE__SIM__META_ACTION_HPP_
#define COTDRIVE__SIM__META_ACTION_HPP_

#include "cotdrive/world/world.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <string_view>

namespace cotdrive
{

enum class MetaAction { lane_left, idle, lane_right, faster, slower };

inline constexpr std::array<MetaAction, 5> kAllMetaActions{
  MetaAction::lane_left, MetaAction::idle, MetaAction::lane_right, MetaAction::faster,
  MetaAction::slower};

/// Target-speed increment applied by FASTER / SLOWER [m/s].
inline constexpr double kSpeedStep = 2.5;

inline std::string_view to_token(MetaAction a)
{
  switch (a) {
    case MetaAction::lane_left:
      return "LANE_LEFT";
    case MetaAction::idle:
      return "IDLE";
    case MetaAction::lane_right:
      return "LANE_RIGHT";
    case MetaAction::faster:
      return "FASTER";
    case MetaAction::slower:
      return "SLOWER";
  }
  return "?";
}

/// Exact, upper-case token lookup. Case folding is the decoder's job.
inline std::optional<MetaAction> meta_action_from_token(std::string_view token)
{
  for (MetaAction a : kAllMetaActions) {
    if (to_token(a) == token) {
      return a;
    }
  }
  return std::nullopt;
}

inline bool is_lane_change(MetaAction a)
{
  return a == MetaAction::lane_left || a == MetaAction::lane_right;
}

inline MetaAction opposite(MetaAction a)
{
  switch (a) {
    case MetaAction::lane_left:
      return MetaAction::lane_right;
    case MetaAction::lane_right:
      return MetaAction::lane_left;
    case MetaAction::faster:
      return MetaAction::slower;
    case MetaAction::slower:
      return MetaAction::faster;
    case MetaAction::idle:
      return MetaAction::idle;
  }
  return MetaAction::idle;
}

namespace detail
{
inline bool within(std::pair<double, double> zone, double s)
{
  return s >= zone.first && s <= zone.second;
}
}  // namespace detail

/// Applies one ego decision to the targets tracked by the controllers.
///
/// FASTER / SLOWER move the target speed by kSpeedStep, clamped to
/// [0, speed_cap]. Lane changes retarget the neighbor of the current target
/// lane when it exists and both lanes allow lateral moves at the ego's
/// position; otherwise the action is a recorded no-op.
inline World apply_meta_action(const World & world, MetaAction action)
{
  World next = world;
  next.actions_applied += 1;
  next.last_action_noop = false;
  next.last_action_offnetwork = false;
  switch (action) {
    case MetaAction::faster:
      next.ego_target_speed = std::clamp(world.ego_target_speed + kSpeedStep, 0.0, world.speed_cap);
      break;
    case MetaAction::slower:
      next.ego_target_speed = std::clamp(world.ego_target_speed - kSpeedStep, 0.0, world.speed_cap);
      break;
    case MetaAction::idle:
      break;
    case MetaAction::lane_left:
    case MetaAction::lane_right: {
      const auto neighbor = action == MetaAction::lane_left
                              ? world.road.left_of(world.ego_target_lane)
                              : world.road.right_of(world.ego_target_lane);
      bool allowed = false;
      if (neighbor) {
        const VehicleState & ego = world.ego();
        const Lane & from = world.road.lane(world.ego_target_lane);
        const Lane & to = world.road.lane(*neighbor);
        allowed = detail::within(from.change_zone(), from.project(ego.position).s) &&
                  detail::within(to.change_zone(), to.project(ego.position).s);
      }
      if (allowed) {
        next.ego_target_lane = *neighbor;
      } else {
        next.last_action_noop = true;
        next.last_action_offnetwork = !neighbor.has_value();
      }
      break;
    }
  }
  return next;
}

}  // namespace cotdrive

#endif  // COTDRIVE__SIM__META_ACTION_HPP_
