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

#ifndef COTDRIVE__BASELINES__MPC_HPP_
#define COTDRIVE__BASELINES__MPC_HPP_

#include "cotdrive/sim/meta_action.hpp"
#include "cotdrive/sim/scenario.hpp"
#include "cotdrive/sim/step.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cotdrive
{

struct MpcParams
{
  int horizon{3};                // decisions
  double decision_period{1.0};   // [s]
  double w_collision{1e6};
  double w_speed{1.0};           // per (m/s)^2 and physics step
  double w_lane_change{5.0};     // per lane-change decision
  double w_offroad{1e6};
  std::optional<double> reference_speed;  // [m/s]; the world's speed cap if unset

  void validate() const
  {
    if (horizon < 1) {
      throw std::invalid_argument("mpc horizon must be >= 1");
    }
    if (!(decision_period > 0.0)) {
      throw std::invalid_argument("mpc decision period must be positive");
    }
    for (double w : {w_collision, w_speed, w_lane_change, w_offroad}) {
      if (!(w >= 0.0)) {
        throw std::invalid_argument("mpc weights must be >= 0");
      }
    }
  }
};

/// Sequence enumeration order; earlier wins ties.
inline constexpr std::array<MetaAction, 5> kMpcActionOrder{
  MetaAction::idle, MetaAction::faster, MetaAction::slower, MetaAction::lane_left,
  MetaAction::lane_right};

/// Reads the "mpc" object of a scenario document; absent keys keep defaults.
inline MpcParams mpc_params_from_json(const nlohmann::json & scenario)
{
  MpcParams p;
  if (!scenario.contains("mpc")) {
    return p;
  }
  const auto & j = scenario.at("mpc");
  if (!j.is_object()) {
    throw std::invalid_argument("\"mpc\" must be an object");
  }
  p.horizon = j.value("horizon", p.horizon);
  p.decision_period = j.value("decision_period", p.decision_period);
  p.w_collision = j.value("w_collision", p.w_collision);
  p.w_speed = j.value("w_speed", p.w_speed);
  p.w_lane_change = j.value("w_lane_change", p.w_lane_change);
  p.w_offroad = j.value("w_offroad", p.w_offroad);
  if (j.contains("reference_speed") && !j.at("reference_speed").is_null()) {
    p.reference_speed = j.at("reference_speed").get<double>();
  }
  p.validate();
  return p;
}

inline nlohmann::json to_json(const MpcParams & p)
{
  nlohmann::json j{
    {"horizon", p.horizon},       {"decision_period", p.decision_period},
    {"w_collision", p.w_collision}, {"w_speed", p.w_speed},
    {"w_lane_change", p.w_lane_change}, {"w_offroad", p.w_offroad},
  };
  j["reference_speed"] = p.reference_speed ? nlohmann::json(*p.reference_speed) : nlohmann::json();
  return j;
}

namespace detail
{

inline int mpc_steps_per_decision(const MpcParams & p)
{
  return std::max(1, static_cast<int>(std::lround(p.decision_period / kPhysicsDt)));
}

/// Ego has driven past the end of a lane that leads nowhere.
inline bool ego_off_network(const World & world)
{
  const VehicleState & ego = world.ego();
  const Lane & lane = world.road.lane(ego.lane_ref.lane);
  return ego.lane_ref.s > lane.length() && !next_lane(world, ego, ego.lane_ref.lane);
}

/// Stage cost of one physics step, evaluated on the post-step world.
inline double mpc_step_cost(const World & world, const MpcParams & p, double v_ref, bool offnetwork_target)
{
  const double dv = world.ego().speed - v_ref;
  const bool off = offnetwork_target || ego_off_network(world);
  return p.w_collision * (ego_collides(world) ? 1.0 : 0.0) + p.w_speed * dv * dv +
         p.w_offroad * (off ? 1.0 : 0.0);
}

struct MpcSearch
{
  const MpcParams & params;
  double v_ref;
  int steps;
  double best_cost{std::numeric_limits<double>::infinity()};
  MetaAction best_first{MetaAction::idle};

  void expand(const World & world, int depth, double partial, MetaAction first)
  {
    for (MetaAction a : kMpcActionOrder) {
      const MetaAction head = depth == 0 ? a : first;
      World w = apply_meta_action(world, a);
      double cost = partial;
      if (is_lane_change(a)) {
        cost += params.w_lane_change;
      }
      const bool offnetwork = w.last_action_offnetwork;
      bool pruned = cost >= best_cost;
      for (int k = 0; k < steps && !pruned; ++k) {
        w = step(w, kPhysicsDt, BackgroundModel::constant_speed);
        cost += mpc_step_cost(w, params, v_ref, offnetwork);
        // costs are non-negative and ties go to the earlier sequence
        pruned = cost >= best_cost;
      }
      if (pruned) {
        continue;
      }
      if (depth + 1 == params.horizon) {
        best_cost = cost;
        best_first = head;
      } else {
        expand(w, depth + 1, cost, head);
      }
    }
  }
};

}  // namespace detail

/// Receding-horizon choice over all 5^horizon meta-action sequences, with
/// background traffic predicted at constant speed. Returns the first action of
/// the cheapest sequence; ties go to the lexicographically first sequence in
/// kMpcActionOrder.
inline MetaAction mpc_plan(const World & world, const MpcParams & params = {})
{
  params.validate();
  detail::MpcSearch search{
    params, params.reference_speed.value_or(world.speed_cap), detail::mpc_steps_per_decision(params)};
  search.expand(world, 0, 0.0, MetaAction::idle);
  return search.best_first;
}

}  // namespace cotdrive

#endif  // COTDRIVE__BASELINES__MPC_HPP_
