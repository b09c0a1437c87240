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

#ifndef COTDRIVE__EVAL__EPISODE_HPP_
#define COTDRIVE__EVAL__EPISODE_HPP_

#include "cotdrive/eval/agents.hpp"
#include "cotdrive/llm/completion.hpp"
#include "cotdrive/sim/scenario.hpp"
#include "cotdrive/sim/step.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cotdrive
{

enum class Outcome { success, collision, timeout, agent_error };

inline std::string_view to_string(Outcome o)
{
  switch (o) {
    case Outcome::success:
      return "success";
    case Outcome::collision:
      return "collision";
    case Outcome::timeout:
      return "timeout";
    case Outcome::agent_error:
      return "agent_error";
  }
  return "?";
}

struct DecisionRecord
{
  double sim_time{0.0};
  MetaAction action{MetaAction::idle};
  bool fallback_used{false};
  // lowest lead TTC observed since the previous decision (at t = 0 for the first)
  double min_ttc{std::numeric_limits<double>::infinity()};

  bool operator==(const DecisionRecord &) const = default;
};

struct EpisodeResult
{
  ScenarioKind scenario{ScenarioKind::highway};
  std::uint64_t seed{0};
  Outcome outcome{Outcome::timeout};
  std::vector<DecisionRecord> decisions;
  double sim_time_elapsed{0.0};
  std::string error;  // agent_error only

  bool operator==(const EpisodeResult &) const = default;
};

/// Called after each decision, before it is applied.
using DecisionObserver =
  std::function<void(const World &, const SceneDescription &, const Decision &)>;

/// Physics steps per 1 Hz decision.
inline constexpr int kStepsPerDecision = 15;

/// Runs one episode from an already spawned world.
inline EpisodeResult run_episode_from(
  World world, const ScenarioConfig & config, Agent & agent, const DecisionObserver & observer = {})
{
  EpisodeResult r;
  r.scenario = config.kind;
  r.seed = config.seed;
  const VehicleId ego_id = world.ego().id;
  double min_ttc = lead_gap_and_ttc(world, ego_id).ttc;

  EpisodeStatus status = episode_status(world, config);
  while (status == EpisodeStatus::running) {
    const SceneDescription scene = serialize_scene(world, ego_id);
    Decision d;
    try {
      d = agent.decide(world, scene);
    } catch (const llm::BackendError & e) {
      r.outcome = Outcome::agent_error;
      r.error = e.what();
      r.sim_time_elapsed = world.sim_time;
      return r;
    } catch (const SceneError & e) {
      r.outcome = Outcome::agent_error;
      r.error = e.what();
      r.sim_time_elapsed = world.sim_time;
      return r;
    }
    if (observer) {
      observer(world, scene, d);
    }
    r.decisions.push_back({world.sim_time, d.action, d.fallback_used, min_ttc});
    min_ttc = std::numeric_limits<double>::infinity();
    world = apply_meta_action(world, d.action);
    for (int k = 0; k < kStepsPerDecision && status == EpisodeStatus::running; ++k) {
      world = step(world, kPhysicsDt);
      min_ttc = std::min(min_ttc, lead_gap_and_ttc(world, ego_id).ttc);
      status = episode_status(world, config);
    }
  }
  switch (status) {
    case EpisodeStatus::success:
      r.outcome = Outcome::success;
      break;
    case EpisodeStatus::collision:
      r.outcome = Outcome::collision;
      break;
    default:
      r.outcome = Outcome::timeout;
      break;
  }
  r.sim_time_elapsed = world.sim_time;
  return r;
}

inline EpisodeResult run_episode(
  const ScenarioConfig & config, Agent & agent, const DecisionObserver & observer = {})
{
  config.validate();
  return run_episode_from(spawn_scenario(config), config, agent, observer);
}

inline nlohmann::json finite_or_null(double v)
{
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json();
}

/// One audit line per episode.
inline nlohmann::json to_json(const EpisodeResult & r)
{
  nlohmann::json decisions = nlohmann::json::array();
  for (const auto & d : r.decisions) {
    decisions.push_back({
      {"sim_time", d.sim_time},
      {"action", to_token(d.action)},
      {"fallback_used", d.fallback_used},
      {"min_ttc", finite_or_null(d.min_ttc)},
    });
  }
  nlohmann::json j{
    {"scenario", to_string(r.scenario)},
    {"seed", r.seed},
    {"outcome", to_string(r.outcome)},
    {"sim_time_elapsed", r.sim_time_elapsed},
    {"decisions", decisions},
  };
  if (!r.error.empty()) {
    j["error"] = r.error;
  }
  return j;
}

}  // namespace cotdrive

#endif  // COTDRIVE__EVAL__EPISODE_HPP_
