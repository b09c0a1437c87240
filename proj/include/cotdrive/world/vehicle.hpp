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

#ifndef COTDRIVE__WORLD__VEHICLE_HPP_
#define COTDRIVE__WORLD__VEHICLE_HPP_

#include "cotdrive/world/geometry.hpp"
#include "cotdrive/world/road.hpp"

#include <cstdint>

namespace cotdrive
{

using VehicleId = std::int32_t;

enum class VehicleKind { ego, background };

struct LaneRef
{
  LaneId lane{0};
  double s{0.0};
};

struct VehicleState
{
  VehicleId id{0};
  Vec2 position;
  double heading{0.0};  // [-pi, pi)
  double speed{0.0};
  double length{5.0};
  double width{2.0};
  LaneRef lane_ref;
  VehicleKind kind{VehicleKind::background};
  // desired free-flow speed for car following; unused for the ego
  double desired_speed{0.0};
};

/// Upper bound on steering magnitude accepted by the kinematic model [rad].
inline constexpr double kSteerMax = 0.5;
/// Physics step [s].
inline constexpr double kPhysicsDt = 1.0 / 15.0;
/// Vehicles farther than this from the observer are invisible [m].
inline constexpr double kSensingRadius = 50.0;

}  // namespace cotdrive

#endif  // COTDRIVE__WORLD__VEHICLE_HPP_
