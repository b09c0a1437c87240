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

#ifndef COTDRIVE__SCENE__RASTER_HPP_
#define COTDRIVE__SCENE__RASTER_HPP_

#include "cotdrive/world/collision.hpp"
#include "cotdrive/world/world.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cotdrive
{

/// World-frame window rendered into the image.
struct Viewport
{
  Vec2 center;
  double width{100.0};   // [m]
  double height{100.0};  // [m]
};

struct ImageSize
{
  int width{256};
  int height{256};
};

using Rgb = std::array<std::uint8_t, 3>;

namespace palette
{
inline constexpr Rgb kBackground{34, 85, 34};
inline constexpr Rgb kLane{90, 90, 90};
inline constexpr Rgb kVehicle{40, 110, 220};
inline constexpr Rgb kEgo{220, 40, 40};
}  // namespace palette

/// Top-down binary PPM (P6). Pixel centers are sampled; row 0 is the top edge
/// (largest y). Vehicles are drawn over lanes, the ego last.
inline std::vector<std::uint8_t> rasterize_topdown(
  const World & world, const Viewport & view, const ImageSize & size)
{
  if (!(std::isfinite(view.width) && std::isfinite(view.height) && view.width > 0.0 &&
        view.height > 0.0 && std::isfinite(view.center.x) && std::isfinite(view.center.y))) {
    throw std::invalid_argument("rasterize_topdown: degenerate viewport");
  }
  if (size.width < 64 || size.height < 64) {
    throw std::invalid_argument("rasterize_topdown: image must be at least 64x64 pixels");
  }

  const std::string header =
    "P6\n" + std::to_string(size.width) + " " + std::to_string(size.height) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.reserve(header.size() + static_cast<std::size_t>(size.width) * size.height * 3);

  const double px_w = view.width / size.width;
  const double px_h = view.height / size.height;
  const double left = view.center.x - 0.5 * view.width;
  const double top = view.center.y + 0.5 * view.height;

  for (int row = 0; row < size.height; ++row) {
    for (int col = 0; col < size.width; ++col) {
      const Vec2 p{left + (col + 0.5) * px_w, top - (row + 0.5) * px_h};
      Rgb color = palette::kBackground;
      for (const auto & [id, lane] : world.road.lanes()) {
        const LaneProjection proj = lane.project(p);
        if (proj.s >= 0.0 && proj.s <= lane.length() && std::abs(proj.lateral) <= 0.5 * lane.width()) {
          color = palette::kLane;
          break;
        }
      }
      for (const auto & v : world.vehicles) {
        if (v.kind == VehicleKind::background && footprint_contains(v, p)) {
          color = palette::kVehicle;
        }
      }
      for (const auto & v : world.vehicles) {
        if (v.kind == VehicleKind::ego && footprint_contains(v, p)) {
          color = palette::kEgo;
        }
      }
      bytes.insert(bytes.end(), color.begin(), color.end());
    }
  }
  return bytes;
}

}  // namespace cotdrive

#endif  // COTDRIVE__SCENE__RASTER_HPP_
