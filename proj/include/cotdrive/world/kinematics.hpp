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

#ifndef COTDRIVE__WORLD__KINEMATICS_HPP_
#define COTDRIVE__WORLD__KINEMATICS_HPP_

#include "cotdrive/world/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cotdrive
{

/// One semi-implicit Euler step of the kinematic bicycle model.
///
/// Speed is integrated first and clamped to [0, speed_cap]; the position then
/// advances with the new speed along the current heading, and the heading
/// turns at (speed / length) * tan(steer). Steering is clamped to
/// +/- kSteerMax rather than rejected.
inline VehicleState kinematic_update(
  const VehicleState & state, double accel, double steer, double dt,
  double speed_cap = std::numeric_limits<double>::infinity())
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("kinematic_update: dt must be positive");
  }
  const double delta = std::clamp(steer, -kSteerMax, kSteerMax);
  VehicleState next = state;
  next.speed = std::clamp(state.speed + accel * dt, 0.0, speed_cap);
  next.position.x = state.position.x + next.speed * std::cos(state.heading) * dt;
  next.position.y = state.position.y + next.speed * std::sin(state.heading) * dt;
  next.heading = normalize_angle(state.heading + (next.speed / state.length) * std::tan(delta) * dt);
  return next;
}

}  // namespace cotdrive

#endif  // COTDRIVE__WORLD__KINEMATICS_HPP_
