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

#ifndef COTDRIVE__BASELINES__GREEDY_HPP_
#define COTDRIVE__BASELINES__GREEDY_HPP_

#include "cotdrive/sim/meta_action.hpp"
#include "cotdrive/world/queries.hpp"

namespace cotdrive
{

/// Lead TTC below which the time-greedy policy brakes [s].
inline constexpr double kGreedyBrakeTtc = 1.5;

/// Time-incentivized policy: always FASTER unless the same-lane leader is about
/// to be hit. Never changes lanes and ignores crossing traffic.
inline MetaAction greedy_time_policy(const World & world)
{
  const GapTtc lead = lead_gap_and_ttc(world, world.ego().id);
  return lead.ttc < kGreedyBrakeTtc ? MetaAction::slower : MetaAction::faster;
}

}  // namespace cotdrive

#endif  // COTDRIVE__BASELINES__GREEDY_HPP_
