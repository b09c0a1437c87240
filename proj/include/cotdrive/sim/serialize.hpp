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

#ifndef COTDRIVE__SIM__SERIALIZE_HPP_
#define COTDRIVE__SIM__SERIALIZE_HPP_

#include "cotdrive/sim/scenario.hpp"
#include "cotdrive/world/world.hpp"

#include <nlohmann/json.hpp>

#include <sstream>
#include <stdexcept>
#include <string>

namespace cotdrive
{

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline nlohmann::json to_json(const ScenarioConfig & c)
{
  nlohmann::json flags = nlohmann::json::array();
  for (Condition f : c.condition_flags) {
    flags.push_back(std::string(to_string(f)));
  }
  return {
    {"kind", std::string(to_string(c.kind))},
    {"n_background", c.n_background},
    {"seed", c.seed},
    {"max_sim_time", c.max_sim_time},
    {"speed_cap", c.speed_cap},
    {"condition_flags", flags},
  };
}

/// Reads a scenario document. Missing keys fall back to the defaults of the
/// given kind; unknown values are rejected.
inline ScenarioConfig scenario_config_from_json(const nlohmann::json & j)
{
  if (!j.is_object()) {
    throw ConfigError("scenario config must be a JSON object");
  }
  try {
    const auto kind_name = j.at("kind").get<std::string>();
    const auto kind = scenario_kind_from_string(kind_name);
    if (!kind) {
      throw ConfigError("unknown scenario kind '" + kind_name + "'");
    }
    ScenarioConfig c = default_config(*kind);
    if (j.contains("n_background")) {
      c.n_background = j.at("n_background").get<int>();
    }
    if (j.contains("seed")) {
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("max_sim_time")) {
      c.max_sim_time = j.at("max_sim_time").get<double>();
    }
    if (j.contains("speed_cap")) {
      c.speed_cap = j.at("speed_cap").get<double>();
    }
    if (j.contains("condition_flags")) {
      for (const auto & f : j.at("condition_flags")) {
        const auto name = f.get<std::string>();
        const auto cond = condition_from_string(name);
        if (!cond) {
          throw ConfigError("unknown condition flag '" + name + "'");
        }
        c.condition_flags.insert(*cond);
      }
    }
    c.validate();
    return c;
  } catch (const nlohmann::json::exception & e) {
    throw ConfigError(std::string("invalid scenario config: ") + e.what());
  } catch (const std::invalid_argument & e) {
    throw ConfigError(std::string("invalid scenario config: ") + e.what());
  }
}

inline nlohmann::json to_json(const VehicleState & v)
{
  return {
    {"id", v.id},
    {"kind", v.kind == VehicleKind::ego ? "ego" : "background"},
    {"x", v.position.x},
    {"y", v.position.y},
    {"heading", v.heading},
    {"speed", v.speed},
    {"length", v.length},
    {"width", v.width},
    {"lane", v.lane_ref.lane},
    {"s", v.lane_ref.s},
    {"desired_speed", v.desired_speed},
  };
}

/// Full world state, including road geometry and generator state. Two worlds
/// serialize to the same bytes iff they are the same state.
inline nlohmann::json to_json(const World & w)
{
  nlohmann::json lanes = nlohmann::json::array();
  for (const auto & [id, lane] : w.road.lanes()) {
    nlohmann::json pts = nlohmann::json::array();
    for (const Vec2 & p : lane.centerline()) {
      pts.push_back({p.x, p.y});
    }
    lanes.push_back({
      {"id", id},
      {"centerline", pts},
      {"width", lane.width()},
      {"speed_limit", lane.speed_limit()},
      {"successors", lane.successors()},
      {"change_zone", {lane.change_zone().first, lane.change_zone().second}},
      {"left", w.road.left_of(id) ? nlohmann::json(*w.road.left_of(id)) : nlohmann::json()},
      {"right", w.road.right_of(id) ? nlohmann::json(*w.road.right_of(id)) : nlohmann::json()},
    });
  }
  nlohmann::json conflicts = nlohmann::json::array();
  for (const auto & z : w.road.conflicts()) {
    conflicts.push_back({
      {"id", z.id},
      {"first", {z.first.lane, z.first.s_begin, z.first.s_end}},
      {"second", {z.second.lane, z.second.s_begin, z.second.s_end}},
    });
  }
  nlohmann::json vehicles = nlohmann::json::array();
  for (const auto & v : w.vehicles) {
    vehicles.push_back(to_json(v));
  }
  nlohmann::json flags = nlohmann::json::array();
  for (Condition f : w.conditions) {
    flags.push_back(std::string(to_string(f)));
  }
  std::ostringstream rng;
  rng << w.rng.engine();
  return {
    {"kind", std::string(to_string(w.kind))},
    {"lanes", lanes},
    {"conflicts", conflicts},
    {"vehicles", vehicles},
    {"sim_time", w.sim_time},
    {"speed_cap", w.speed_cap},
    {"conditions", flags},
    {"ego_target_speed", w.ego_target_speed},
    {"ego_target_lane", w.ego_target_lane},
    {"ego_route", w.ego_route},
    {"goal", {{"lanes", w.goal.lanes}, {"s_min", w.goal.s_min}, {"max_lateral", w.goal.max_lateral}}},
    {"rng", rng.str()},
    {"actions_applied", w.actions_applied},
    {"last_action_noop", w.last_action_noop},
  };
}

}  // namespace cotdrive

#endif  // COTDRIVE__SIM__SERIALIZE_HPP_
