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

#ifndef COTDRIVE__WORLD__GEOMETRY_HPP_
#define COTDRIVE__WORLD__GEOMETRY_HPP_

#include <cmath>
#include <numbers>

namespace cotdrive
{

struct Vec2
{
  double x{0.0};
  double y{0.0};

  constexpr Vec2 operator+(const Vec2 & o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2 & o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr bool operator==(const Vec2 &) const = default;
};

constexpr double dot(const Vec2 & a, const Vec2 & b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2 & a, const Vec2 & b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2 & a) { return std::hypot(a.x, a.y); }
inline double distance(const Vec2 & a, const Vec2 & b) { return norm(a - b); }
inline Vec2 unit_from_heading(double heading) { return {std::cos(heading), std::sin(heading)}; }

/// Wraps an angle into [-pi, pi).
inline double normalize_angle(double angle)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle + std::numbers::pi, two_pi);
  if (a < 0.0) {
    a += two_pi;
  }
  a -= std::numbers::pi;
  // fmod rounding can land exactly on +pi
  if (a >= std::numbers::pi) {
    a -= two_pi;
  }
  return a;
}

}  // namespace cotdrive

#endif  // COTDRIVE__WORLD__GEOMETRY_HPP_
