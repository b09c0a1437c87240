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

#ifndef COTDRIVE__WORLD__WORLD_HPP_
#define COTDRIVE__WORLD__WORLD_HPP_

#include "cotdrive/world/road.hpp"
#include "cotdrive/world/vehicle.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cotdrive
{

enum class ScenarioKind { highway, intersection, roundabout, merge };

inline constexpr std::array<ScenarioKind, 4> kAllScenarioKinds{
  ScenarioKind::intersection, ScenarioKind::roundabout, ScenarioKind::highway,
  ScenarioKind::merge};

inline std::string_view to_string(ScenarioKind kind)
{
  switch (kind) {
    case ScenarioKind::highway:
      return "highway";
    case ScenarioKind::intersection:
      return "intersection";
    case ScenarioKind::roundabout:
      return "roundabout";
    case ScenarioKind::merge:
      return "merge";
  }
  return "?";
}

inline std::optional<ScenarioKind> scenario_kind_from_string(std::string_view name)
{
  for (ScenarioKind k : kAllScenarioKinds) {
    if (to_string(k) == name) {
      return k;
    }
  }
  return std::nullopt;
}

enum class Condition { wet, snow, low_visibility };

inline std::string_view to_string(Condition c)
{
  switch (c) {
    case Condition::wet:
      return "wet";
    case Condition::snow:
      return "snow";
    case Condition::low_visibility:
      return "low_visibility";
  }
  return "?";
}

inline std::optional<Condition> condition_from_string(std::string_view name)
{
  for (Condition c : {Condition::wet, Condition::snow, Condition::low_visibility}) {
    if (to_string(c) == name) {
      return c;
    }
  }
  return std::nullopt;
}

using ConditionFlags = std::set<Condition>;

/// Region the ego must reach: any of `lanes`, at arc length >= s_min, within
/// `max_lateral` of the centerline.
struct GoalRegion
{
  std::vector<LaneId> lanes;
  double s_min{0.0};
  double max_lateral{std::numeric_limits<double>::infinity()};
};

/// Portable uniform draws on top of the standard-specified mt19937_64 stream.
class Rng
{
public:
  Rng() = default;
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi)
  {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  const std::mt19937_64 & engine() const { return engine_; }

private:
  std::mt19937_64 engine_{0};
};

struct World
{
  ScenarioKind kind{ScenarioKind::highway};
  RoadNetwork road;
  std::vector<VehicleState> vehicles;
  double sim_time{0.0};
  double speed_cap{30.0};
  ConditionFlags conditions;
  double ego_target_speed{0.0};
  LaneId ego_target_lane{0};
  // lanes the ego drives through, in order; successors are picked from here
  std::vector<LaneId> ego_route;
  GoalRegion goal;
  Rng rng;
  // bookkeeping for the most recent meta-action
  std::uint64_t actions_applied{0};
  bool last_action_noop{false};
  bool last_action_offnetwork{false};

  const VehicleState * find(VehicleId id) const
  {
    const auto it = std::find_if(
      vehicles.begin(), vehicles.end(), [id](const VehicleState & v) { return v.id == id; });
    return it == vehicles.end() ? nullptr : &*it;
  }

  const VehicleState & ego() const
  {
    const auto it = std::find_if(vehicles.begin(), vehicles.end(), [](const VehicleState & v) {
      return v.kind == VehicleKind::ego;
    });
    if (it == vehicles.end()) {
      throw std::logic_error("world has no ego vehicle");
    }
    return *it;
  }
  VehicleState & ego() { return const_cast<VehicleState &>(std::as_const(*this).ego()); }
};

}  // namespace cotdrive

#endif  // COTDRIVE__WORLD__WORLD_HPP_
