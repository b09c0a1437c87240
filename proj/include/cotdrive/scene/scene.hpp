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

#ifndef COTDRIVE__SCENE__SCENE_HPP_
#define COTDRIVE__SCENE__SCENE_HPP_

#include "cotdrive/sim/meta_action.hpp"
#include "cotdrive/world/queries.hpp"
#include "cotdrive/world/world.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace cotdrive
{

/// At most this many neighbors are described, nearest first.
inline constexpr std::size_t kMaxListedVehicles = 8;
/// Lane ends farther ahead than this are not mentioned [m].
inline constexpr double kLaneEndHorizon = 200.0;

enum class Relation { same_lane, left, right, crossing, other };

struct ConflictInfo
{
  int zone{0};
  double entry{0.0};  // ego arc length to the zone entry [m]; negative once inside
  double exit{0.0};

  bool operator==(const ConflictInfo &) const = default;
};

struct NeighborInfo
{
  VehicleId id{0};
  Relation relation{Relation::other};
  int lanes_over{0};  // left / right: how many lanes over
  int zone{0};        // crossing: zone id
  double distance{0.0};
  // signed center arc length along the ego lane (positive ahead); for crossing
  // vehicles the arc length along their own path to the zone entry / exit
  double along{0.0};
  double zone_exit{0.0};
  double speed{0.0};
  double length{0.0};

  bool operator==(const NeighborInfo &) const = default;
};

struct EgoInfo
{
  VehicleId id{0};
  int lane_index{1};
  int lane_count{1};
  int target_lane_index{1};
  double speed{0.0};
  double target_speed{0.0};
  double speed_limit{0.0};
  double length{5.0};
  bool left_available{false};
  bool right_available{false};
  std::optional<double> lane_end;  // arc length to where the ego's path ends

  bool operator==(const EgoInfo &) const = default;
};

/// Quantized scene fields; serialize_scene renders exactly these.
struct SceneStructured
{
  ScenarioKind road{ScenarioKind::highway};
  ConditionFlags conditions;
  EgoInfo ego;
  std::vector<ConflictInfo> conflicts;
  std::vector<NeighborInfo> vehicles;

  bool operator==(const SceneStructured &) const = default;
};

struct SceneDescription
{
  std::string text;
  SceneStructured structured;
};

class SceneError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kSceneBegin = "SCENE";
inline constexpr std::string_view kSceneEnd = "END SCENE";
inline constexpr std::string_view kNoVehiclesLine = "No other vehicles within sensing range.";

namespace detail
{

/// Rounds to 0.1 and removes negative zero.
inline double quantize(double v)
{
  const double q = std::round(v * 10.0) / 10.0;
  return q == 0.0 ? 0.0 : q;
}

inline std::string fixed1(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", quantize(v));
  return buf;
}

inline std::string_view condition_notice(Condition c)
{
  switch (c) {
    case Condition::wet:
      return "Notice: The road surface is wet; braking distances are longer, reduce speed.";
    case Condition::snow:
      return "Notice: The road is covered in snow; reduce speed.";
    case Condition::low_visibility:
      return "Notice: Visibility is reduced; other vehicles may be detected late.";
  }
  return "";
}

inline std::string_view relation_name(Relation r)
{
  switch (r) {
    case Relation::same_lane:
      return "same lane";
    case Relation::left:
      return "left lane";
    case Relation::right:
      return "right lane";
    case Relation::crossing:
      return "crossing zone";
    case Relation::other:
      return "other";
  }
  return "?";
}

/// Arc length from v to the start of `lane` along v's path, if reachable.
inline std::optional<double> offset_to_lane(
  const World & world, const VehicleState & v, LaneId lane, double range)
{
  for (const PathLane & pl : path_ahead(world, v, range)) {
    if (pl.lane == lane) {
      return pl.offset;
    }
  }
  return std::nullopt;
}

struct ZoneSide
{
  int zone;
  const LaneSpan * ego_span;
  const LaneSpan * other_span;
  double entry;
  double exit;
};

/// Conflict zones the ego still has ahead of (or is inside).
inline std::vector<ZoneSide> active_zones(const World & world, const VehicleState & ego)
{
  std::vector<ZoneSide> out;
  for (const ConflictZone & z : world.road.conflicts()) {
    for (int side = 0; side < 2; ++side) {
      const LaneSpan & mine = side == 0 ? z.first : z.second;
      const LaneSpan & theirs = side == 0 ? z.second : z.first;
      const auto offset = offset_to_lane(world, ego, mine.lane, kLaneEndHorizon);
      if (!offset) {
        continue;
      }
      const double exit = *offset + mine.s_end;
      if (exit > 0.0) {
        out.push_back({z.id, &mine, &theirs, *offset + mine.s_begin, exit});
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Renders the structured scene as text. parse_scene inverts this exactly.
inline std::string format_scene(const SceneStructured & s)
{
  using detail::fixed1;
  std::ostringstream out;
  out << kSceneBegin << "\n";
  out << "Road: " << to_string(s.road) << "\n";
  out << "Conditions: ";
  if (s.conditions.empty()) {
    out << "none";
  } else {
    bool first = true;
    for (Condition c : s.conditions) {
      out << (first ? "" : ", ") << to_string(c);
      first = false;
    }
  }
  out << "\n";
  for (Condition c : s.conditions) {
    out << detail::condition_notice(c) << "\n";
  }
  const EgoInfo & e = s.ego;
  out << "Ego: id " << e.id << ", lane " << e.lane_index << " of " << e.lane_count
      << " (1 = rightmost), speed " << fixed1(e.speed) << " m/s, target speed "
      << fixed1(e.target_speed) << " m/s, speed limit " << fixed1(e.speed_limit)
      << " m/s, length " << fixed1(e.length) << " m\n";
  out << "Ego target lane: " << e.target_lane_index << "\n";
  out << "Lane change: left " << (e.left_available ? "available" : "unavailable") << ", right "
      << (e.right_available ? "available" : "unavailable") << "\n";
  if (e.lane_end) {
    out << "Lane end: " << fixed1(*e.lane_end) << " m ahead\n";
  } else {
    out << "Lane end: none within " << fixed1(kLaneEndHorizon) << " m\n";
  }
  for (const ConflictInfo & z : s.conflicts) {
    out << "Conflict zone " << z.zone << ": entry " << fixed1(z.entry) << " m, exit "
        << fixed1(z.exit) << " m\n";
  }
  if (s.vehicles.empty()) {
    out << kNoVehiclesLine << "\n";
  } else {
    out << "Vehicles within " << fixed1(kSensingRadius) << " m: " << s.vehicles.size() << "\n";
    for (const NeighborInfo & v : s.vehicles) {
      out << "- vehicle " << v.id << ": " << detail::relation_name(v.relation);
      if (v.relation == Relation::left || v.relation == Relation::right) {
        out << " " << v.lanes_over;
      } else if (v.relation == Relation::crossing) {
        out << " " << v.zone;
      }
      out << ", distance " << fixed1(v.distance) << " m";
      if (v.relation == Relation::crossing) {
        out << ", entry " << fixed1(v.along) << " m, exit " << fixed1(v.zone_exit) << " m";
      } else {
        out << ", along " << fixed1(v.along) << " m";
      }
      out << ", speed " << fixed1(v.speed) << " m/s, length " << fixed1(v.length) << " m\n";
    }
  }
  out << kSceneEnd << "\n";
  return out.str();
}

/// Extracts the quantized scene fields an observer of `ego_id` can perceive.
inline SceneStructured describe_scene(const World & world, VehicleId ego_id)
{
  using detail::quantize;
  const VehicleState * ego_ptr = world.find(ego_id);
  if (!ego_ptr) {
    throw SceneError("serialize_scene: unknown ego id " + std::to_string(ego_id));
  }
  const VehicleState & ego = *ego_ptr;
  const Lane & ego_lane = world.road.lane(ego.lane_ref.lane);

  SceneStructured s;
  s.road = world.kind;
  s.conditions = world.conditions;
  s.ego.id = ego.id;
  s.ego.lane_index = world.road.lane_index(ego.lane_ref.lane);
  s.ego.lane_count = world.road.parallel_count(ego.lane_ref.lane);
  s.ego.target_lane_index = world.road.lane_index(world.ego_target_lane);
  s.ego.speed = quantize(ego.speed);
  s.ego.target_speed = quantize(world.ego_target_speed);
  s.ego.speed_limit = quantize(world.speed_cap);
  s.ego.length = quantize(ego.length);
  if (ego.kind == VehicleKind::ego) {
    // a legal change into a lane that dead-ends within the horizon is not offered
    auto available = [&](MetaAction a) {
      const World next = apply_meta_action(world, a);
      if (next.last_action_noop) {
        return false;
      }
      const Lane & to = world.road.lane(next.ego_target_lane);
      const double remaining = to.length() - to.project(ego.position).s;
      return !to.successors().empty() || remaining > kLaneEndHorizon;
    };
    s.ego.left_available = available(MetaAction::lane_left);
    s.ego.right_available = available(MetaAction::lane_right);
  }
  const PathLane last = path_ahead(world, ego, kLaneEndHorizon).back();
  if (!next_lane(world, ego, last.lane)) {
    const double end = last.offset + world.road.lane(last.lane).length();
    if (end <= kLaneEndHorizon) {
      s.ego.lane_end = quantize(end);
    }
  }

  const auto zones = detail::active_zones(world, ego);
  for (const auto & z : zones) {
    s.conflicts.push_back({z.zone, quantize(z.entry), quantize(z.exit)});
  }

  struct Candidate
  {
    long key;
    NeighborInfo info;
  };
  std::vector<Candidate> seen;
  for (const VehicleState & o : world.vehicles) {
    if (o.id == ego.id) {
      continue;
    }
    const double d = distance(ego.position, o.position);
    if (d > kSensingRadius) {
      continue;
    }
    NeighborInfo info;
    info.id = o.id;
    info.distance = quantize(d);
    info.speed = quantize(o.speed);
    info.length = quantize(o.length);
    bool classified = false;
    if (const auto ahead = along_path_distance(world, ego, o, kLaneEndHorizon)) {
      info.relation = Relation::same_lane;
      info.along = quantize(*ahead);
      classified = true;
    } else if (const auto behind = along_path_distance(world, o, ego, kLaneEndHorizon)) {
      info.relation = Relation::same_lane;
      info.along = quantize(-*behind);
      classified = true;
    }
    for (std::size_t zi = 0; zi < zones.size() && !classified; ++zi) {
      const auto & z = zones[zi];
      const auto offset = detail::offset_to_lane(world, o, z.other_span->lane, kLaneEndHorizon);
      if (!offset) {
        continue;
      }
      const double exit = *offset + z.other_span->s_end;
      if (exit > 0.0) {
        info.relation = Relation::crossing;
        info.zone = z.zone;
        info.along = quantize(*offset + z.other_span->s_begin);
        info.zone_exit = quantize(exit);
        classified = true;
      }
    }
    if (!classified) {
      const double along = ego_lane.project(o.position).s - ego.lane_ref.s;
      info.along = quantize(along);
      info.relation = Relation::other;
      int k = 1;
      for (auto l = world.road.left_of(ego.lane_ref.lane); l; l = world.road.left_of(*l), ++k) {
        if (*l == o.lane_ref.lane) {
          info.relation = Relation::left;
          info.lanes_over = k;
        }
      }
      k = 1;
      for (auto r = world.road.right_of(ego.lane_ref.lane); r; r = world.road.right_of(*r), ++k) {
        if (*r == o.lane_ref.lane) {
          info.relation = Relation::right;
          info.lanes_over = k;
        }
      }
    }
    seen.push_back({std::lround(info.distance * 10.0), info});
  }
  std::sort(seen.begin(), seen.end(), [](const Candidate & a, const Candidate & b) {
    return std::tie(a.key, a.info.id) < std::tie(b.key, b.info.id);
  });
  for (std::size_t i = 0; i < seen.size() && i < kMaxListedVehicles; ++i) {
    s.vehicles.push_back(seen[i].info);
  }
  return s;
}

inline SceneDescription serialize_scene(const World & world, VehicleId ego_id)
{
  SceneDescription d;
  d.structured = describe_scene(world, ego_id);
  d.text = format_scene(d.structured);
  return d;
}

namespace detail
{

class LineReader
{
public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool done() const { return pos_ >= text_.size(); }

  std::string_view next()
  {
    const auto nl = text_.find('\n', pos_);
    const auto end = nl == std::string_view::npos ? text_.size() : nl;
    std::string_view line = text_.substr(pos_, end - pos_);
    pos_ = nl == std::string_view::npos ? text_.size() : nl + 1;
    return line;
  }

  std::string_view peek() const
  {
    LineReader copy = *this;
    return copy.next();
  }

private:
  std::string_view text_;
  std::size_t pos_{0};
};

inline bool consume(std::string_view & s, std::string_view prefix)
{
  if (s.substr(0, prefix.size()) != prefix) {
    return false;
  }
  s.remove_prefix(prefix.size());
  return true;
}

inline void expect(std::string_view & s, std::string_view prefix)
{
  if (!consume(s, prefix)) {
    throw SceneError("scene parse: expected '" + std::string(prefix) + "' at '" + std::string(s) + "'");
  }
}

inline double read_number(std::string_view & s)
{
  std::size_t n = 0;
  while (n < s.size() && (std::isdigit(static_cast<unsigned char>(s[n])) || s[n] == '-' || s[n] == '.')) {
    ++n;
  }
  if (n == 0) {
    throw SceneError("scene parse: expected a number at '" + std::string(s) + "'");
  }
  const std::string token(s.substr(0, n));
  s.remove_prefix(n);
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) {
      throw SceneError("scene parse: bad number '" + token + "'");
    }
    return v;
  } catch (const std::logic_error &) {
    throw SceneError("scene parse: bad number '" + token + "'");
  }
}

inline void finish(std::string_view s)
{
  if (!s.empty()) {
    throw SceneError("scene parse: trailing text '" + std::string(s) + "'");
  }
}

inline int read_int(std::string_view & s)
{
  const double v = read_number(s);
  if (v != std::floor(v)) {
    throw SceneError("scene parse: expected an integer");
  }
  return static_cast<int>(v);
}

}  // namespace detail

/// Parses the first serialized scene block found in `text` (surrounding text is
/// ignored). Throws SceneError if no well-formed block is present.
inline SceneStructured parse_scene(std::string_view text)
{
  using namespace detail;
  // locate a line that is exactly the begin marker
  std::size_t start = std::string_view::npos;
  for (std::size_t pos = 0; pos <= text.size();) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    if (text.substr(pos, end - pos) == kSceneBegin) {
      start = pos;
      break;
    }
    if (nl == std::string_view::npos) {
      break;
    }
    pos = nl + 1;
  }
  if (start == std::string_view::npos) {
    throw SceneError("scene parse: no scene block found");
  }
  LineReader lines(text.substr(start));
  lines.next();

  SceneStructured s;
  std::string_view line = lines.next();
  expect(line, "Road: ");
  const auto road = scenario_kind_from_string(line);
  if (!road) {
    throw SceneError("scene parse: unknown road kind '" + std::string(line) + "'");
  }
  s.road = *road;

  line = lines.next();
  expect(line, "Conditions: ");
  if (line != "none") {
    while (!line.empty()) {
      const auto comma = line.find(", ");
      const auto name = line.substr(0, comma);
      const auto cond = condition_from_string(name);
      if (!cond) {
        throw SceneError("scene parse: unknown condition '" + std::string(name) + "'");
      }
      s.conditions.insert(*cond);
      line = comma == std::string_view::npos ? std::string_view{} : line.substr(comma + 2);
    }
  }
  while (lines.peek().substr(0, 8) == "Notice: ") {
    lines.next();
  }

  line = lines.next();
  expect(line, "Ego: id ");
  s.ego.id = read_int(line);
  expect(line, ", lane ");
  s.ego.lane_index = read_int(line);
  expect(line, " of ");
  s.ego.lane_count = read_int(line);
  expect(line, " (1 = rightmost), speed ");
  s.ego.speed = read_number(line);
  expect(line, " m/s, target speed ");
  s.ego.target_speed = read_number(line);
  expect(line, " m/s, speed limit ");
  s.ego.speed_limit = read_number(line);
  expect(line, " m/s, length ");
  s.ego.length = read_number(line);
  expect(line, " m");
  finish(line);

  line = lines.next();
  expect(line, "Ego target lane: ");
  s.ego.target_lane_index = read_int(line);
  finish(line);

  line = lines.next();
  expect(line, "Lane change: left ");
  s.ego.left_available = consume(line, "available");
  if (!s.ego.left_available) {
    expect(line, "unavailable");
  }
  expect(line, ", right ");
  s.ego.right_available = consume(line, "available");
  if (!s.ego.right_available) {
    expect(line, "unavailable");
  }
  finish(line);

  line = lines.next();
  expect(line, "Lane end: ");
  if (consume(line, "none within ")) {
    read_number(line);
    expect(line, " m");
  } else {
    s.ego.lane_end = read_number(line);
    expect(line, " m ahead");
  }
  finish(line);

  while (lines.peek().substr(0, 14) == "Conflict zone ") {
    line = lines.next();
    expect(line, "Conflict zone ");
    ConflictInfo z;
    z.zone = read_int(line);
    expect(line, ": entry ");
    z.entry = read_number(line);
    expect(line, " m, exit ");
    z.exit = read_number(line);
    expect(line, " m");
    finish(line);
    s.conflicts.push_back(z);
  }

  line = lines.next();
  if (line != kNoVehiclesLine) {
    expect(line, "Vehicles within ");
    read_number(line);
    expect(line, " m: ");
    const int count = read_int(line);
    finish(line);
    for (int i = 0; i < count; ++i) {
      line = lines.next();
      NeighborInfo v;
      expect(line, "- vehicle ");
      v.id = read_int(line);
      expect(line, ": ");
      if (consume(line, "same lane")) {
        v.relation = Relation::same_lane;
      } else if (consume(line, "left lane ")) {
        v.relation = Relation::left;
        v.lanes_over = read_int(line);
      } else if (consume(line, "right lane ")) {
        v.relation = Relation::right;
        v.lanes_over = read_int(line);
      } else if (consume(line, "crossing zone ")) {
        v.relation = Relation::crossing;
        v.zone = read_int(line);
      } else {
        expect(line, "other");
        v.relation = Relation::other;
      }
      expect(line, ", distance ");
      v.distance = read_number(line);
      expect(line, " m");
      if (v.relation == Relation::crossing) {
        expect(line, ", entry ");
        v.along = read_number(line);
        expect(line, " m, exit ");
        v.zone_exit = read_number(line);
        expect(line, " m");
      } else {
        expect(line, ", along ");
        v.along = read_number(line);
        expect(line, " m");
      }
      expect(line, ", speed ");
      v.speed = read_number(line);
      expect(line, " m/s, length ");
      v.length = read_number(line);
      expect(line, " m");
      finish(line);
      s.vehicles.push_back(v);
    }
  }
  line = lines.next();
  if (line != kSceneEnd) {
    throw SceneError("scene parse: missing end marker");
  }
  return s;
}

}  // namespace cotdrive

#endif  // COTDRIVE__SCENE__SCENE_HPP_
