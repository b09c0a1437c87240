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

#ifndef COTDRIVE__AGENT__SCRIPTED_BACKEND_HPP_
#define COTDRIVE__AGENT__SCRIPTED_BACKEND_HPP_

#include "cotdrive/agent/templates.hpp"
#include "cotdrive/llm/completion.hpp"
#include "cotdrive/scene/scene.hpp"
#include "cotdrive/sim/step.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cotdrive
{

namespace scripted
{

inline constexpr double kThreatTtc = 3.0;           // [s]
inline constexpr double kConflictMargin = 2.0;      // [s]
// merging into circulating traffic: the follower adapts once the ego is in
inline constexpr double kMergeMargin = 0.5;         // [s]
inline constexpr double kWeatherFactor = 0.6;
inline constexpr double kAdjacentClearance = 15.0;  // [m]
inline constexpr double kPlanHorizon = 10.0;        // [s]
inline constexpr double kFollowHeadway = 1.5;       // [s]
inline constexpr double kRampEndBuffer = 10.0;      // [m]
inline constexpr double kComfortDecel = 1.5;        // [m/s^2]
inline constexpr double kStandstillGap = 2.0;       // [m]
// below this target speed a blocked junction approach starts crossing instead of holding
inline constexpr double kApproachSpeed = 5.0;       // [m/s]

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LeadInfo
{
  NeighborInfo vehicle;
  double gap{0.0};
  double ttc{kInf};
};

/// Arrival and departure times at one conflict zone.
struct ConflictTiming
{
  VehicleId vehicle{0};
  int zone{0};
  double other_in{0.0};
  double other_out{0.0};
  double ego_in{kInf};
  double ego_out{kInf};

  double separation() const { return std::max(other_in - ego_out, ego_in - other_out); }
};

enum class Plan { go, keep, yield };

/// Everything the scripted model "thinks"; the three answers render from it.
struct Analysis
{
  double effective_cap{0.0};
  std::optional<LeadInfo> lead;
  bool lead_threat{false};
  std::vector<ConflictTiming> conflicts;  // for the plan finally chosen
  std::optional<Plan> plan;
  MetaAction action{MetaAction::idle};
  std::string reason;
};

inline double bumper_gap(const EgoInfo & ego, const NeighborInfo & v)
{
  return std::max(0.0, std::abs(v.along) - 0.5 * (ego.length + v.length));
}

/// Gap needed to shed `closing` m/s at a comfortable deceleration.
inline double braking_gap(double closing)
{
  return closing > 0.0 ? closing * closing / (2.0 * kComfortDecel) + kStandstillGap : 0.0;
}

inline std::optional<LeadInfo> find_lead(const SceneStructured & s)
{
  std::optional<LeadInfo> lead;
  for (const NeighborInfo & v : s.vehicles) {
    if (v.relation != Relation::same_lane || v.along <= 0.0) {
      continue;
    }
    if (!lead || v.along < lead->vehicle.along) {
      LeadInfo l;
      l.vehicle = v;
      l.gap = bumper_gap(s.ego, v);
      const double closing = s.ego.speed - v.speed;
      l.ttc = closing > 0.0 ? l.gap / closing : kInf;
      lead = l;
    }
  }
  return lead;
}

/// Front gap and safety of the lane `side` (left/right) one lane over.
struct AdjacentLane
{
  bool available{false};
  bool clear{false};
  double front_gap{kInf};
};

inline AdjacentLane inspect_adjacent(const SceneStructured & s, Relation side)
{
  AdjacentLane lane;
  lane.available = side == Relation::left ? s.ego.left_available : s.ego.right_available;
  lane.clear = lane.available;
  for (const NeighborInfo & v : s.vehicles) {
    if (v.relation != side || v.lanes_over != 1) {
      continue;
    }
    if (std::abs(v.along) <= kAdjacentClearance) {
      lane.clear = false;
    }
    if (v.along > 0.0) {
      const double gap = bumper_gap(s.ego, v);
      lane.front_gap = std::min(lane.front_gap, gap);
      const double closing = s.ego.speed - v.speed;
      if (closing > 0.0 && (gap / closing < kThreatTtc || gap < braking_gap(closing))) {
        lane.clear = false;
      }
    } else {
      // a faster vehicle closing from behind within the threat horizon
      const double closing = v.speed - s.ego.speed;
      if (closing > 0.0 && bumper_gap(s.ego, v) / closing < kThreatTtc) {
        lane.clear = false;
      }
    }
  }
  return lane;
}

/// Ego arc-length profile under `plan`, sampled at the physics rate.
inline std::vector<double> ego_profile(const SceneStructured & s, Plan plan)
{
  const double cap = s.ego.speed_limit;
  const int per_decision = static_cast<int>(std::lround(1.0 / kPhysicsDt));
  const int steps = static_cast<int>(std::lround(kPlanHorizon / kPhysicsDt));
  std::vector<double> pos(steps + 1, 0.0);
  double v = s.ego.speed;
  double target = s.ego.target_speed;
  double x = 0.0;
  for (int k = 0; k < steps; ++k) {
    if (k % per_decision == 0) {
      if (plan == Plan::go) {
        target = std::min(cap, target + kSpeedStep);
      } else if (plan == Plan::yield) {
        target = std::max(0.0, target - kSpeedStep);
      }
    }
    const double a = std::clamp(kEgoSpeedGain * (target - v), -kEgoAccelLimit, kEgoAccelLimit);
    v = std::clamp(v + a * kPhysicsDt, 0.0, cap);
    x += v * kPhysicsDt;
    pos[k + 1] = x;
  }
  return pos;
}

/// Distance covered when braking with SLOWER every decision until standstill.
inline double stopping_distance(const SceneStructured & s)
{
  double v = s.ego.speed;
  double target = s.ego.target_speed;
  double x = 0.0;
  const int per_decision = static_cast<int>(std::lround(1.0 / kPhysicsDt));
  for (int k = 0; v > 0.0 && k < 60 * per_decision; ++k) {
    if (k % per_decision == 0) {
      target = std::max(0.0, target - kSpeedStep);
    }
    const double a = std::clamp(kEgoSpeedGain * (target - v), -kEgoAccelLimit, kEgoAccelLimit);
    v = std::max(0.0, v + a * kPhysicsDt);
    x += v * kPhysicsDt;
  }
  return x;
}

inline double first_time_at(const std::vector<double> & profile, double s)
{
  if (s <= 0.0) {
    return 0.0;
  }
  for (std::size_t k = 1; k < profile.size(); ++k) {
    if (profile[k] >= s) {
      return static_cast<double>(k) * kPhysicsDt;
    }
  }
  return kInf;
}

inline std::vector<ConflictTiming> conflict_timings(const SceneStructured & s, Plan plan)
{
  const auto profile = ego_profile(s, plan);
  std::vector<ConflictTiming> out;
  for (const NeighborInfo & v : s.vehicles) {
    if (v.relation != Relation::crossing) {
      continue;
    }
    const auto zone = std::find_if(s.conflicts.begin(), s.conflicts.end(), [&](const ConflictInfo & z) {
      return z.zone == v.zone;
    });
    if (zone == s.conflicts.end()) {
      continue;
    }
    ConflictTiming t;
    t.vehicle = v.id;
    t.zone = v.zone;
    const double speed = std::max(v.speed, 1e-6);
    t.other_in = std::max(0.0, v.along) / speed;
    t.other_out = v.speed > 1e-6 ? v.zone_exit / speed : kInf;
    t.ego_in = first_time_at(profile, zone->entry);
    t.ego_out = first_time_at(profile, zone->exit);
    out.push_back(t);
  }
  return out;
}

inline double plan_margin(const std::vector<ConflictTiming> & timings)
{
  double m = kInf;
  for (const auto & t : timings) {
    m = std::min(m, t.separation());
  }
  return m;
}

inline std::string_view plan_name(Plan p)
{
  switch (p) {
    case Plan::go:
      return "accelerating through";
    case Plan::keep:
      return "keeping the current target speed";
    case Plan::yield:
      return "slowing down to yield";
  }
  return "?";
}

inline MetaAction plan_action(Plan p, const SceneStructured & s)
{
  switch (p) {
    case Plan::go:
      return s.ego.target_speed < s.ego.speed_limit ? MetaAction::faster : MetaAction::idle;
    case Plan::keep:
      return MetaAction::idle;
    case Plan::yield:
      return s.ego.target_speed > 0.0 ? MetaAction::slower : MetaAction::idle;
  }
  return MetaAction::idle;
}

inline std::string fmt(double v)
{
  if (!std::isfinite(v)) {
    return "inf";
  }
  return detail::fixed1(v);
}

inline double required_margin(const SceneStructured & s)
{
  return s.road == ScenarioKind::roundabout ? kMergeMargin : kConflictMargin;
}

/// True when the ego clears every conflict zone ahead before a vehicle hidden
/// just beyond the sensing radius, driving at the speed limit, could arrive.
inline bool clears_before_unseen(const SceneStructured & s, Plan plan)
{
  const auto profile = ego_profile(s, plan);
  for (const ConflictInfo & z : s.conflicts) {
    const double to_center = std::max(0.0, 0.5 * (z.entry + z.exit));
    const double half = 0.5 * (z.exit - z.entry);
    const double hidden = to_center < kSensingRadius
                            ? std::sqrt(kSensingRadius * kSensingRadius - to_center * to_center)
                            : 0.0;
    const double arrival = std::max(0.0, hidden - half) / std::max(s.ego.speed_limit, 1e-6);
    if (first_time_at(profile, z.exit) > arrival) {
      return false;
    }
  }
  return true;
}

/// The rule policy.
inline Analysis analyze(const SceneStructured & s)
{
  Analysis a;
  const bool slippery = s.conditions.count(Condition::wet) || s.conditions.count(Condition::snow);
  a.effective_cap = slippery ? kWeatherFactor * s.ego.speed_limit : s.ego.speed_limit;
  a.lead = find_lead(s);
  a.lead_threat =
    a.lead && (a.lead->ttc < kThreatTtc || a.lead->gap < braking_gap(s.ego.speed - a.lead->vehicle.speed));

  auto decide = [&](MetaAction act, std::string why) {
    a.action = act;
    a.reason = std::move(why);
    return a;
  };

  if (s.ego.target_speed > a.effective_cap + 1e-9) {
    return decide(
      MetaAction::slower, "the target speed is above the " + fmt(a.effective_cap) +
                            " m/s that the road conditions allow, so I slow down");
  }
  if (a.lead_threat) {
    return decide(
      MetaAction::slower, "I am closing in on vehicle " + std::to_string(a.lead->vehicle.id) + " (gap " +
                            fmt(a.lead->gap) + " m, time to collision " + fmt(a.lead->ttc) + " s), so I slow down");
  }

  // on a merge road the rightmost lane is the ramp
  const bool on_ramp = s.road == ScenarioKind::merge && s.ego.lane_index == 1 &&
                       s.ego.target_lane_index == s.ego.lane_index;
  if (on_ramp) {
    const AdjacentLane left = inspect_adjacent(s, Relation::left);
    if (left.available && left.clear) {
      return decide(MetaAction::lane_left, "the merge gap on the left is free, so I merge");
    }
    if (s.ego.lane_end && *s.ego.lane_end < stopping_distance(s) + kRampEndBuffer && s.ego.target_speed > 0.0) {
      return decide(
        MetaAction::slower, "the ramp ends in " + fmt(*s.ego.lane_end) +
                              " m and the main lane is not clear yet, so I slow down");
    }
    std::optional<double> main_speed;
    for (const NeighborInfo & v : s.vehicles) {
      if (v.relation == Relation::left && v.lanes_over == 1) {
        main_speed = std::min(main_speed.value_or(kInf), v.speed);
      }
    }
    if (main_speed) {
      if (s.ego.target_speed > *main_speed + 0.5 * kSpeedStep) {
        return decide(MetaAction::slower, "I match the speed of the traffic on the main lane before merging");
      }
      if (s.ego.target_speed + 0.5 * kSpeedStep < *main_speed && s.ego.target_speed + kSpeedStep <= a.effective_cap) {
        return decide(MetaAction::faster, "I match the speed of the traffic on the main lane before merging");
      }
      return decide(MetaAction::idle, "I keep pace with the main lane and wait for a gap");
    }
  }

  if (a.lead && a.lead->vehicle.speed < s.ego.target_speed && !on_ramp) {
    const AdjacentLane left = inspect_adjacent(s, Relation::left);
    const AdjacentLane right = inspect_adjacent(s, Relation::right);
    const bool use_left = left.available && left.clear;
    const bool use_right = right.available && right.clear;
    std::optional<MetaAction> change;
    double best_gap = a.lead->gap;
    if (use_left && use_right) {
      if (left.front_gap > right.front_gap) {
        change = MetaAction::lane_left;
        best_gap = left.front_gap;
      } else if (right.front_gap > left.front_gap) {
        change = MetaAction::lane_right;
        best_gap = right.front_gap;
      }
    } else if (use_left) {
      change = MetaAction::lane_left;
      best_gap = left.front_gap;
    } else if (use_right) {
      change = MetaAction::lane_right;
      best_gap = right.front_gap;
    }
    if (change && best_gap > a.lead->gap) {
      return decide(
        *change, std::string("vehicle ") + std::to_string(a.lead->vehicle.id) +
                   " ahead is slower and the " + (*change == MetaAction::lane_left ? "left" : "right") +
                   " lane has more room, so I change lanes");
    }
  }

  const bool junction = s.road == ScenarioKind::intersection || s.road == ScenarioKind::roundabout;
  if (junction && !s.conflicts.empty()) {
    auto choose = [&](Plan p, std::vector<ConflictTiming> timings, std::string why) {
      a.plan = p;
      a.conflicts = std::move(timings);
      if (p == Plan::go && a.lead && a.lead->gap < kFollowHeadway * s.ego.speed + 5.0) {
        return decide(MetaAction::idle, "the conflict zone is clear but I keep distance to the vehicle ahead");
      }
      return decide(plan_action(p, s), std::move(why));
    };
    const double margin = required_margin(s);
    auto go = conflict_timings(s, Plan::go);
    auto keep = conflict_timings(s, Plan::keep);
    auto yield = conflict_timings(s, Plan::yield);
    const bool go_safe = plan_margin(go) >= margin;
    if (go_safe && clears_before_unseen(s, Plan::go)) {
      return choose(Plan::go, std::move(go), "the conflict zone is clear, so I accelerate through it");
    }
    if (s.ego.target_speed >= kApproachSpeed && plan_margin(keep) >= margin) {
      return choose(
        Plan::keep, std::move(keep), "the conflict zone is not fully visible yet, so I approach at constant speed");
    }
    if (go_safe) {
      return choose(Plan::go, std::move(go), "the visible crossing traffic leaves a safe gap, so I start crossing");
    }
    if (plan_margin(yield) >= margin) {
      return choose(Plan::yield, std::move(yield), "crossing traffic is close, so I slow down to yield");
    }
    Plan best = Plan::go;
    double best_margin = plan_margin(go);
    if (plan_margin(yield) > best_margin) {
      best = Plan::yield;
      best_margin = plan_margin(yield);
    }
    if (plan_margin(keep) > best_margin) {
      best = Plan::keep;
    }
    return choose(
      best, conflict_timings(s, best),
      "no option keeps a full time gap to crossing traffic, " + std::string(plan_name(best)) +
        " keeps the largest one");
  }

  if (a.lead && a.lead->gap < kFollowHeadway * s.ego.speed + 5.0) {
    if (a.lead->vehicle.speed < s.ego.speed) {
      return decide(MetaAction::slower, "I am closing in on vehicle " + std::to_string(a.lead->vehicle.id) + ", so I slow down");
    }
    return decide(MetaAction::idle, "I follow vehicle " + std::to_string(a.lead->vehicle.id) + " at a safe distance");
  }
  if (s.ego.target_speed + kSpeedStep <= a.effective_cap + 1e-9) {
    return decide(MetaAction::faster, "the road ahead is clear and I am below the speed limit, so I speed up");
  }
  return decide(MetaAction::idle, "the road ahead is clear and I am at my target speed");
}

inline std::string describe_neighbor(const NeighborInfo & v)
{
  std::ostringstream out;
  out << "vehicle " << v.id;
  switch (v.relation) {
    case Relation::same_lane:
      out << " in my lane " << fmt(std::abs(v.along)) << " m " << (v.along >= 0.0 ? "ahead" : "behind");
      break;
    case Relation::left:
    case Relation::right:
      out << " " << v.lanes_over << " lane(s) to the " << (v.relation == Relation::left ? "left" : "right")
          << ", " << fmt(std::abs(v.along)) << " m " << (v.along >= 0.0 ? "ahead" : "behind");
      break;
    case Relation::crossing:
      out << " approaching conflict zone " << v.zone << ", " << fmt(v.along) << " m from it";
      break;
    case Relation::other:
      out << " on another road " << fmt(v.distance) << " m away";
      break;
  }
  out << " at " << fmt(v.speed) << " m/s";
  return out.str();
}

inline std::string scene_understanding_answer(const SceneStructured & s)
{
  std::ostringstream out;
  out << "Scene understanding: The road layout is " << to_string(s.road);
  if (s.conditions.empty()) {
    out << " in normal conditions";
  } else {
    out << " with conditions:";
    for (Condition c : s.conditions) {
      out << " " << to_string(c);
    }
  }
  out << ". I am in lane " << s.ego.lane_index << " of " << s.ego.lane_count << " at " << fmt(s.ego.speed)
      << " m/s with target " << fmt(s.ego.target_speed) << " m/s and limit " << fmt(s.ego.speed_limit) << " m/s.";
  if (s.vehicles.empty()) {
    out << " No other vehicles are nearby.";
  } else {
    out << " Nearby:";
    for (std::size_t i = 0; i < s.vehicles.size(); ++i) {
      out << (i == 0 ? " " : "; ") << describe_neighbor(s.vehicles[i]);
    }
    out << ".";
  }
  return out.str();
}

inline std::string prediction_answer(const SceneStructured & s, const Analysis & a)
{
  std::ostringstream out;
  out << "Prediction: ";
  if (a.lead) {
    out << "Vehicle " << a.lead->vehicle.id << " leads with a gap of " << fmt(a.lead->gap) << " m and time to collision "
        << fmt(a.lead->ttc) << " s" << (a.lead_threat ? ", which is a threat." : ", no threat.");
  } else {
    out << "No vehicle leads in my lane.";
  }
  for (const auto & t : conflict_timings(s, Plan::keep)) {
    const bool close = t.separation() < required_margin(s);
    out << " Vehicle " << t.vehicle << " reaches zone " << t.zone << " in " << fmt(t.other_in) << " s and I reach it in "
        << fmt(t.ego_in) << " s" << (close ? ", a conflict." : ", no conflict.");
  }
  return out.str();
}

inline std::string decision_answer(const Analysis & a)
{
  std::string reason = a.reason;
  if (!reason.empty()) {
    reason[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(reason[0])));
  }
  return "Decision: " + reason + ".\nACTION: " + std::string(to_token(a.action));
}

}  // namespace scripted

/// Deterministic stand-in for a fine-tuned model. Reads the serialized scene
/// back out of the prompt and answers whichever stage is being asked.
class ScriptedBackend : public llm::Completer
{
public:
  std::string complete(const llm::CompletionRequest & request) override
  {
    std::optional<SceneStructured> scene;
    bool decision = false;
    bool prediction = false;
    for (const auto & m : request.messages) {
      if (m.role != "user") {
        continue;
      }
      if (!scene) {
        try {
          scene = parse_scene(m.content);
        } catch (const SceneError &) {
        }
      }
      decision = decision || m.content.find(kFormatInstruction) != std::string::npos;
      prediction = prediction || m.content.find("Scene understanding:") != std::string::npos;
    }
    if (!scene) {
      throw SceneError("scripted backend: prompt contains no parseable scene");
    }
    if (decision) {
      return scripted::decision_answer(scripted::analyze(*scene));
    }
    if (prediction) {
      return scripted::prediction_answer(*scene, scripted::analyze(*scene));
    }
    return scripted::scene_understanding_answer(*scene);
  }
};

/// Action the scripted backend would emit for this scene.
inline MetaAction scripted_policy(const SceneStructured & scene) { return scripted::analyze(scene).action; }

}  // namespace cotdrive

#endif  // COTDRIVE__AGENT__SCRIPTED_BACKEND_HPP_
