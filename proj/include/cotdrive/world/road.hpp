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

#ifndef COTDRIVE__WORLD__ROAD_HPP_
#define COTDRIVE__WORLD__ROAD_HPP_

#include "cotdrive/world/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cotdrive
{

using LaneId = std::int32_t;

/// Foot point of a projection onto a lane centerline.
struct LaneProjection
{
  double s{0.0};        // arc length, extrapolated past either end
  double lateral{0.0};  // signed offset, positive to the left of travel
};

class Lane
{
public:
  Lane() = default;

  Lane(LaneId id, std::vector<Vec2> centerline, double width, double speed_limit)
  : id_(id), centerline_(std::move(centerline)), width_(width), speed_limit_(speed_limit)
  {
    if (centerline_.size() < 2) {
      throw std::invalid_argument("lane " + std::to_string(id_) + ": centerline needs >= 2 points");
    }
    if (!(width_ > 0.0)) {
      throw std::invalid_argument("lane " + std::to_string(id_) + ": width must be positive");
    }
    cumulative_.reserve(centerline_.size());
    cumulative_.push_back(0.0);
    for (std::size_t i = 1; i < centerline_.size(); ++i) {
      const double len = distance(centerline_[i - 1], centerline_[i]);
      if (!(len > 0.0)) {
        throw std::invalid_argument(
          "lane " + std::to_string(id_) + ": consecutive centerline points coincide");
      }
      cumulative_.push_back(cumulative_.back() + len);
    }
    change_zone_ = {0.0, length()};
  }

  LaneId id() const { return id_; }
  const std::vector<Vec2> & centerline() const { return centerline_; }
  double width() const { return width_; }
  double speed_limit() const { return speed_limit_; }
  double length() const { return cumulative_.back(); }
  const std::vector<LaneId> & successors() const { return successors_; }
  void add_successor(LaneId next) { successors_.push_back(next); }

  /// Arc-length interval in which lateral moves into or out of this lane are allowed.
  std::pair<double, double> change_zone() const { return change_zone_; }
  void set_change_zone(double begin, double end) { change_zone_ = {begin, end}; }

  /// Point on the centerline at arc length s; extrapolates linearly past the ends.
  Vec2 point_at(double s) const
  {
    const std::size_t seg = segment_for(s);
    const Vec2 a = centerline_[seg];
    const Vec2 b = centerline_[seg + 1];
    const double seg_len = cumulative_[seg + 1] - cumulative_[seg];
    return a + (b - a) * ((s - cumulative_[seg]) / seg_len);
  }

  /// Direction of the centerline segment containing s.
  double heading_at(double s) const
  {
    const std::size_t seg = segment_for(s);
    const Vec2 d = centerline_[seg + 1] - centerline_[seg];
    return std::atan2(d.y, d.x);
  }

  LaneProjection project(const Vec2 & p) const
  {
    double best_d2 = std::numeric_limits<double>::infinity();
    LaneProjection best;
    const std::size_t n_seg = centerline_.size() - 1;
    for (std::size_t i = 0; i < n_seg; ++i) {
      const Vec2 a = centerline_[i];
      const Vec2 ab = centerline_[i + 1] - a;
      const double seg_len = cumulative_[i + 1] - cumulative_[i];
      double t = dot(p - a, ab) / (seg_len * seg_len);
      const bool open_front = (i == 0);
      const bool open_back = (i + 1 == n_seg);
      if (!open_front) {
        t = std::max(t, 0.0);
      }
      if (!open_back) {
        t = std::min(t, 1.0);
      }
      // Extrapolation beyond an end only applies to the end segments, and only
      // when the point actually lies beyond that end.
      const double t_clamped = std::clamp(t, 0.0, 1.0);
      const Vec2 foot_clamped = a + ab * t_clamped;
      const Vec2 diff = p - foot_clamped;
      const double d2 = dot(diff, diff);
      if (d2 < best_d2) {
        best_d2 = d2;
        const Vec2 foot = a + ab * t;
        best.s = cumulative_[i] + t * seg_len;
        best.lateral = cross(ab * (1.0 / seg_len), p - foot);
      }
    }
    return best;
  }

private:
  std::size_t segment_for(double s) const
  {
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    std::size_t seg = (it == cumulative_.begin()) ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    return std::min(seg, centerline_.size() - 2);
  }

  LaneId id_{0};
  std::vector<Vec2> centerline_;
  std::vector<double> cumulative_;
  double width_{0.0};
  double speed_limit_{0.0};
  std::vector<LaneId> successors_;
  std::pair<double, double> change_zone_{0.0, 0.0};
};

/// Arc-length interval on one lane. Bounds may be negative, meaning the
/// interval starts on a predecessor along the travelling vehicle's path.
struct LaneSpan
{
  LaneId lane{0};
  double s_begin{0.0};
  double s_end{0.0};
};

/// Two lane spans whose occupants can physically collide (crossing or merging paths).
struct ConflictZone
{
  int id{0};
  LaneSpan first;
  LaneSpan second;
};

/// Lanes, neighbor relations and conflict zones. Copies share storage until
/// one of them is modified, so worlds stay cheap to copy.
class RoadNetwork
{
public:
  void add_lane(Lane lane)
  {
    const LaneId id = lane.id();
    if (has_lane(id)) {
      throw std::invalid_argument("duplicate lane id " + std::to_string(id));
    }
    edit().lanes.emplace(id, std::move(lane));
  }

  /// Declares `left` as the left neighbor of `right` (and vice versa).
  void set_neighbors(LaneId right, LaneId left)
  {
    if (!has_lane(right) || !has_lane(left) || right == left) {
      throw std::invalid_argument("neighbor relation needs two distinct existing lanes");
    }
    Data & d = edit();
    d.left_of[right] = left;
    d.right_of[left] = right;
  }

  void add_conflict(ConflictZone zone) { edit().conflicts.push_back(zone); }

  bool has_lane(LaneId id) const { return data_->lanes.count(id) != 0; }
  const Lane & lane(LaneId id) const
  {
    const auto it = data_->lanes.find(id);
    if (it == data_->lanes.end()) {
      throw std::out_of_range("unknown lane id " + std::to_string(id));
    }
    return it->second;
  }
  Lane & mutable_lane(LaneId id)
  {
    lane(id);
    return edit().lanes.at(id);
  }
  const std::map<LaneId, Lane> & lanes() const { return data_->lanes; }

  std::optional<LaneId> left_of(LaneId id) const { return lookup(data_->left_of, id); }
  std::optional<LaneId> right_of(LaneId id) const { return lookup(data_->right_of, id); }
  const std::vector<ConflictZone> & conflicts() const { return data_->conflicts; }

  /// Position of a lane among its parallel siblings, 1 = rightmost.
  int lane_index(LaneId id) const
  {
    int index = 1;
    for (auto r = right_of(id); r; r = right_of(*r)) {
      ++index;
    }
    return index;
  }
  int parallel_count(LaneId id) const
  {
    int count = lane_index(id);
    for (auto l = left_of(id); l; l = left_of(*l)) {
      ++count;
    }
    return count;
  }

private:
  struct Data
  {
    std::map<LaneId, Lane> lanes;
    std::map<LaneId, LaneId> left_of;
    std::map<LaneId, LaneId> right_of;
    std::vector<ConflictZone> conflicts;
  };

  static std::optional<LaneId> lookup(const std::map<LaneId, LaneId> & m, LaneId id)
  {
    const auto it = m.find(id);
    if (it == m.end()) {
      return std::nullopt;
    }
    return it->second;
  }

  Data & edit()
  {
    if (data_.use_count() > 1) {
      data_ = std::make_shared<Data>(*data_);
    }
    return *data_;
  }

  std::shared_ptr<Data> data_{std::make_shared<Data>()};
};

}  // namespace cotdrive

#endif  // COTDRIVE__WORLD__ROAD_HPP_
