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

#ifndef COTDRIVE__EVAL__REPORT_HPP_
#define COTDRIVE__EVAL__REPORT_HPP_

#include "cotdrive/eval/metrics.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace cotdrive
{

/// Agent ids accepted everywhere an agent is named.
inline constexpr std::array<std::string_view, 5> kAgentIds{
  "greedy", "mpc", "cot-scripted", "cot-llm", "cot-llm-nocot"};

struct ReportRow
{
  ScenarioKind scenario{ScenarioKind::highway};
  std::string method;
  MetricsSummary metrics;
};

namespace detail
{

inline std::string one_decimal(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  std::string s = buf;
  return s == "-0.0" ? "0.0" : s;
}

inline std::size_t scenario_rank(ScenarioKind k)
{
  return static_cast<std::size_t>(
    std::find(kAllScenarioKinds.begin(), kAllScenarioKinds.end(), k) - kAllScenarioKinds.begin());
}

inline std::size_t method_rank(std::string_view m)
{
  return static_cast<std::size_t>(std::find(kAgentIds.begin(), kAgentIds.end(), m) - kAgentIds.begin());
}

inline std::string method_label(std::string_view m)
{
  if (m == "greedy") {
    return "Greedy (RL stand-in)";
  }
  if (m == "mpc") {
    return "MPC";
  }
  if (m == "cot-scripted") {
    return "Ours (scripted CoT)";
  }
  if (m == "cot-llm") {
    return "Ours (LLM CoT)";
  }
  if (m == "cot-llm-nocot") {
    return "LLM without CoT";
  }
  return std::string(m);
}

inline std::string scenario_label(ScenarioKind k)
{
  std::string s(to_string(k));
  s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

}  // namespace detail

/// Scenario-major, then the fixed method order of kAgentIds. Stable for
/// unknown method names.
inline std::vector<ReportRow> ordered_rows(std::vector<ReportRow> rows)
{
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow & a, const ReportRow & b) {
    const auto ka = std::make_pair(detail::scenario_rank(a.scenario), detail::method_rank(a.method));
    const auto kb = std::make_pair(detail::scenario_rank(b.scenario), detail::method_rank(b.method));
    return ka < kb;
  });
  return rows;
}

inline std::string emit_csv(const std::vector<ReportRow> & rows)
{
  std::string out = "scenario,method,fail_pct,inefficiency_pct,avg_time_s\n";
  for (const ReportRow & r : ordered_rows(rows)) {
    out += std::string(to_string(r.scenario)) + "," + r.method + "," + detail::one_decimal(r.metrics.fail_pct) +
           "," + detail::one_decimal(r.metrics.inefficiency_pct) + "," +
           (r.metrics.avg_time_s ? detail::one_decimal(*r.metrics.avg_time_s) : "n/a") + "\n";
  }
  return out;
}

/// Table with the scenario named once per group.
inline std::string emit_markdown(const std::vector<ReportRow> & rows)
{
  std::string out =
    "| Scenario | Method | Fail | Inefficiency | Average Time |\n"
    "|---|---|---|---|---|\n";
  std::optional<ScenarioKind> current;
  for (const ReportRow & r : ordered_rows(rows)) {
    const std::string scenario = current == r.scenario ? "" : detail::scenario_label(r.scenario);
    current = r.scenario;
    out += "| " + scenario + " | " + detail::method_label(r.method) + " | " +
           detail::one_decimal(r.metrics.fail_pct) + "% | " + detail::one_decimal(r.metrics.inefficiency_pct) +
           "% | " + (r.metrics.avg_time_s ? detail::one_decimal(*r.metrics.avg_time_s) + " s" : "n/a") + " |\n";
  }
  return out;
}

}  // namespace cotdrive

#endif  // COTDRIVE__EVAL__REPORT_HPP_
