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

#ifndef COTDRIVE__EVAL__METRICS_HPP_
#define COTDRIVE__EVAL__METRICS_HPP_

#include "cotdrive/eval/episode.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace cotdrive
{

/// A speed reversal inside this window is churn unless the lead TTC dipped.
inline constexpr std::size_t kSpeedReversalWindow = 2;
inline constexpr std::size_t kLaneReversalWindow = 3;
inline constexpr double kReactionTtc = 3.0;  // [s]

/// Counts decisions undone shortly afterwards without a safety reason.
///
/// FASTER/SLOWER reversed by the opposite action within two decisions counts
/// when the lowest TTC over the records after the first one, up to and
/// including the reversal, stayed at or above kReactionTtc. A lane change
/// reverted within three decisions always counts. Each decision belongs to at
/// most one pair; pairs are matched greedily from the start.
inline std::size_t count_ineffective(std::span<const DecisionRecord> decisions)
{
  std::vector<bool> used(decisions.size(), false);
  std::size_t count = 0;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (used[i]) {
      continue;
    }
    const MetaAction a = decisions[i].action;
    const bool speed = a == MetaAction::faster || a == MetaAction::slower;
    if (!speed && !is_lane_change(a)) {
      continue;
    }
    const std::size_t window = speed ? kSpeedReversalWindow : kLaneReversalWindow;
    double min_ttc = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < decisions.size() && j <= i + window; ++j) {
      min_ttc = std::min(min_ttc, decisions[j].min_ttc);
      if (used[j] || decisions[j].action != opposite(a)) {
        continue;
      }
      if (!speed || min_ttc >= kReactionTtc) {
        used[i] = used[j] = true;
        ++count;
      }
      break;
    }
  }
  return count;
}

struct MetricsSummary
{
  std::size_t episodes{0};
  std::size_t successes{0};
  std::size_t collisions{0};
  std::size_t timeouts{0};
  std::size_t agent_errors{0};
  std::size_t decisions{0};
  std::size_t ineffective{0};
  std::size_t fallbacks{0};
  double fail_pct{0.0};
  double inefficiency_pct{0.0};
  std::optional<double> avg_time_s;  // unset when no episode succeeded

  bool operator==(const MetricsSummary &) const = default;
};

/// Folds episode results in the given order.
inline MetricsSummary aggregate(std::span<const EpisodeResult> results)
{
  if (results.empty()) {
    throw std::invalid_argument("aggregate: no episodes");
  }
  MetricsSummary m;
  m.episodes = results.size();
  double success_time = 0.0;
  for (const EpisodeResult & r : results) {
    switch (r.outcome) {
      case Outcome::success:
        ++m.successes;
        success_time += r.sim_time_elapsed;
        break;
      case Outcome::collision:
        ++m.collisions;
        break;
      case Outcome::timeout:
        ++m.timeouts;
        break;
      case Outcome::agent_error:
        ++m.agent_errors;
        break;
    }
    m.decisions += r.decisions.size();
    m.ineffective += count_ineffective(r.decisions);
    for (const auto & d : r.decisions) {
      m.fallbacks += d.fallback_used ? 1 : 0;
    }
  }
  const double n = static_cast<double>(m.episodes);
  m.fail_pct = static_cast<double>(m.collisions + m.timeouts + m.agent_errors) / n * 100.0;
  m.inefficiency_pct =
    m.decisions == 0 ? 0.0 : static_cast<double>(m.ineffective) / static_cast<double>(m.decisions) * 100.0;
  if (m.successes > 0) {
    m.avg_time_s = success_time / static_cast<double>(m.successes);
  }
  return m;
}

}  // namespace cotdrive

#endif  // COTDRIVE__EVAL__METRICS_HPP_
