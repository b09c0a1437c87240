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

#ifndef COTDRIVE__WORLD__QUERIES_HPP_
#define COTDRIVE__WORLD__QUERIES_HPP_

#include "cotdrive/world/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cotdrive
{

/// Lane the vehicle enters after `lane`: the ego follows its route, others
/// take the first successor.
inline std::optional<LaneId> next_lane(const World & world, const VehicleState & v, LaneId lane)
{
  const auto & succ = world.road.lane(lane).successors();
  if (succ.empty()) {
    return std::nullopt;
  }
  if (v.kind == VehicleKind::ego) {
    const auto & route = world.ego_route;
    const auto it = std::find(route.begin(), route.end(), lane);
    if (it != route.end() && std::next(it) != route.end() &&
        std::find(succ.begin(), succ.end(), *std::next(it)) != succ.end()) {
      return *std::next(it);
    }
  }
  return succ.front();
}

/// A lane on a vehicle's forward path and the arc length from the vehicle to
/// that lane's s = 0 (negative for the current lane).
struct PathLane
{
  LaneId lane;
  double offset;
};

/// Lanes reachable ahead of `v` within `range` metres, without revisiting a lane.
inline std::vector<PathLane> path_ahead(const World & world, const VehicleState & v, double range)
{
  std::vector<PathLane> path{{v.lane_ref.lane, -v.lane_ref.s}};
  std::set<LaneId> seen{v.lane_ref.lane};
  double end = world.road.lane(v.lane_ref.lane).length() - v.lane_ref.s;
  LaneId current = v.lane_ref.lane;
  while (end < range) {
    const auto next = next_lane(world, v, current);
    if (!next || !seen.insert(*next).second) {
      break;
    }
    path.push_back({*next, end});
    end += world.road.lane(*next).length();
    current = *next;
  }
  return path;
}

/// Arc-length distance from `from` forward to `to` along from's path, if `to`
/// is ahead within `range`.
inline std::optional<double> along_path_distance(
  const World & world, const VehicleState & from, const VehicleState & to, double range)
{
  for (const PathLane & pl : path_ahead(world, from, range)) {
    if (pl.lane == to.lane_ref.lane) {
      const double d = pl.offset + to.lane_ref.s;
      if (d > 0.0 && d <= range) {
        return d;
      }
    }
  }
  return std::nullopt;
}

struct LeaderInfo
{
  std::size_t index;
  double along;  // center-to-center arc length
};

/// Nearest vehicle ahead on the same path. When `sensing_radius` is set, only
/// vehicles whose centers are within that Euclidean distance are considered.
inline std::optional<LeaderInfo> find_leader(
  const World & world, std::size_t self, double range,
  std::optional<double> sensing_radius = std::nullopt)
{
  const VehicleState & me = world.vehicles.at(self);
  const auto path = path_ahead(world, me, range);
  std::optional<LeaderInfo> best;
  for (std::size_t j = 0; j < world.vehicles.size(); ++j) {
    if (j == self) {
      continue;
    }
    const VehicleState & other = world.vehicles[j];
    if (sensing_radius && distance(me.position, other.position) > *sensing_radius) {
      continue;
    }
    for (const PathLane & pl : path) {
      if (pl.lane != other.lane_ref.lane) {
        continue;
      }
      const double d = pl.offset + other.lane_ref.s;
      if (d > 0.0 && d <= range && (!best || d < best->along)) {
        best = LeaderInfo{j, d};
      }
    }
  }
  return best;
}

inline double bumper_gap(const VehicleState & follower, const VehicleState & leader, double along)
{
  return std::max(0.0, along - 0.5 * (follower.length + leader.length));
}

struct GapTtc
{
  std::optional<double> gap;
  double ttc{std::numeric_limits<double>::infinity()};
};

/// Bumper gap to the nearest same-path vehicle ahead within sensing range, and
/// the time to collision at the current closing speed.
inline GapTtc lead_gap_and_ttc(const World & world, VehicleId ego_id)
{
  std::size_t self = world.vehicles.size();
  for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
    if (world.vehicles[i].id == ego_id) {
      self = i;
    }
  }
  if (self == world.vehicles.size()) {
    throw std::out_of_range("lead_gap_and_ttc: unknown vehicle id " + std::to_string(ego_id));
  }
  const auto leader = find_leader(world, self, kSensingRadius, kSensingRadius);
  GapTtc out;
  if (!leader) {
    return out;
  }
  const VehicleState & me = world.vehicles[self];
  const VehicleState & lead = world.vehicles[leader->index];
  out.gap = bumper_gap(me, lead, leader->along);
  const double closing = me.speed - lead.speed;
  if (closing > 0.0) {
    out.ttc = *out.gap / closing;
  }
  return out;
}

}  // namespace cotdrive

#endif  // COTDRIVE__WORLD__QUERIES_HPP_
