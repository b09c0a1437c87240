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

#ifndef COTDRIVE__WORLD__COLLISION_HPP_
#define COTDRIVE__WORLD__COLLISION_HPP_

#include "cotdrive/world/vehicle.hpp"

#include <array>
#include <cmath>
#include <set>
#include <span>
#include <utility>

namespace cotdrive
{

/// Corners of a vehicle footprint, counter-clockwise starting front-left.
inline std::array<Vec2, 4> footprint_corners(const VehicleState & v)
{
  const Vec2 f = unit_from_heading(v.heading) * (0.5 * v.length);
  const Vec2 l = Vec2{-std::sin(v.heading), std::cos(v.heading)} * (0.5 * v.width);
  const Vec2 c = v.position;
  return {c + f + l, c - f + l, c - f - l, c + f - l};
}

/// True if p lies inside (or on) the footprint of v.
inline bool footprint_contains(const VehicleState & v, const Vec2 & p)
{
  const Vec2 d = p - v.position;
  const Vec2 u = unit_from_heading(v.heading);
  const double along = dot(d, u);
  const double across = cross(u, d);
  return std::abs(along) <= 0.5 * v.length && std::abs(across) <= 0.5 * v.width;
}

/// Separating-axis test on the two oriented footprints; touching counts as overlap.
inline bool obb_overlap(const VehicleState & a, const VehicleState & b)
{
  const Vec2 d = b.position - a.position;
  const double reach = 0.5 * (std::hypot(a.length, a.width) + std::hypot(b.length, b.width));
  if (dot(d, d) > reach * reach) {
    return false;
  }

  const Vec2 ua = unit_from_heading(a.heading);
  const Vec2 va{-ua.y, ua.x};
  const Vec2 ub = unit_from_heading(b.heading);
  const Vec2 vb{-ub.y, ub.x};
  const double ha_l = 0.5 * a.length;
  const double ha_w = 0.5 * a.width;
  const double hb_l = 0.5 * b.length;
  const double hb_w = 0.5 * b.width;

  const std::array<Vec2, 4> axes{ua, va, ub, vb};
  for (const Vec2 & axis : axes) {
    const double ra = ha_l * std::abs(dot(ua, axis)) + ha_w * std::abs(dot(va, axis));
    const double rb = hb_l * std::abs(dot(ub, axis)) + hb_w * std::abs(dot(vb, axis));
    if (std::abs(dot(d, axis)) > ra + rb) {
      return false;
    }
  }
  return true;
}

using CollisionPair = std::pair<VehicleId, VehicleId>;

/// Every unordered overlapping pair, stored as (smaller id, larger id).
inline std::set<CollisionPair> detect_collisions(std::span<const VehicleState> vehicles)
{
  std::set<CollisionPair> pairs;
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    for (std::size_t j = i + 1; j < vehicles.size(); ++j) {
      if (obb_overlap(vehicles[i], vehicles[j])) {
        const VehicleId a = vehicles[i].id;
        const VehicleId b = vehicles[j].id;
        pairs.emplace(std::min(a, b), std::max(a, b));
      }
    }
  }
  return pairs;
}

}  // namespace cotdrive

#endif  // COTDRIVE__WORLD__COLLISION_HPP_
