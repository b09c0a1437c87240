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

// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit status is non-zero when any criterion fails.

#include "cotdrive/agent/scripted_backend.hpp"
#include "cotdrive/cli/cli.hpp"
#include "cotdrive/eval/agents.hpp"
#include "cotdrive/eval/evaluate.hpp"
#include "cotdrive/eval/metrics.hpp"
#include "cotdrive/vqa/vqa.hpp"
#include "oracles.hpp"
#include "stub_server.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace
{

using namespace cotdrive;  // NOLINT
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// pinned tolerances
constexpr double kDeterminismBudgetS = 60.0;
constexpr double kOrderingBudgetS = 300.0;
constexpr double kScriptedMaxFailPct = 2.0;
constexpr int kEpisodes = 50;
constexpr int kMpcWorlds = 100;
constexpr int kMaxMpcHorizon = 3;
constexpr int kObbPairs = 1000;
constexpr double kObbBand = 0.02;
constexpr int kFuzzRejections = 1000;
constexpr int kPlatoonSteps = 10000;
constexpr int kReplayEpisodes = 20;
constexpr int kVqaEpisodes = 100;

struct Verdict
{
  bool pass;
  std::string detail;
};

struct Criterion
{
  int id;
  std::string name;
  std::function<Verdict()> check;
};

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char * f, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string slurp(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string & name)
{
  const fs::path dir = fs::temp_directory_path() / ("cotdrive_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_command(std::vector<std::string> args, std::string * err = nullptr)
{
  args.insert(args.begin(), "cotdrive");
  std::vector<const char *> argv;
  for (const auto & a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out;
  std::ostringstream e;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, e);
  if (err != nullptr) {
    *err = e.str();
  }
  return code;
}

Verdict determinism()
{
  const fs::path dir = scratch("determinism");
  double worst = 0.0;
  for (const char * run : {"a", "b"}) {
    const auto t0 = Clock::now();
    std::string err;
    const int code = run_command(
      {"evaluate", "--scenario", "intersection", "--agent", "cot-scripted", "--episodes",
       std::to_string(kEpisodes), "--seed", "7", "--out", (dir / (std::string(run) + ".csv")).string(), "--dump",
       (dir / (std::string(run) + ".jsonl")).string()},
      &err);
    worst = std::max(worst, seconds_since(t0));
    if (code != kExitOk) {
      return {false, "evaluate exited " + std::to_string(code) + ": " + err};
    }
  }
  const bool same_csv = slurp(dir / "a.csv") == slurp(dir / "b.csv");
  const bool same_dump = slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl");
  return {
    same_csv && same_dump && worst < kDeterminismBudgetS,
    std::string("csv ") + (same_csv ? "identical" : "DIFFERS") + ", dump " + (same_dump ? "identical" : "DIFFERS") +
      ", slowest run " + fmt("%.2f", worst) + " s (budget 60 s)"};
}

double fail_pct(const AgentFactory & f)
{
  const auto results = evaluate(default_config(ScenarioKind::intersection, 0), f, kEpisodes, 0, 4);
  return aggregate(results).fail_pct;
}

Verdict safety_ordering()
{
  const auto t0 = Clock::now();
  const double greedy = fail_pct([] { return std::make_unique<GreedyAgent>(); });
  const double mpc = fail_pct([] { return std::make_unique<MpcAgent>(); });
  const double ours = fail_pct([] { return std::make_unique<ScriptedCotAgent>(); });
  const double t = seconds_since(t0);
  const bool ok = ours <= kScriptedMaxFailPct && greedy > ours && ours <= mpc && mpc <= greedy &&
                  t < kOrderingBudgetS;
  return {
    ok, "intersection fail: greedy " + fmt("%.1f", greedy) + "%, mpc " + fmt("%.1f", mpc) + "%, cot-scripted " +
          fmt("%.1f", ours) + "% in " + fmt("%.1f", t) + " s"};
}

Verdict mpc_oracle()
{
  std::mt19937_64 rng(20260);
  int exact = 0;
  for (int i = 0; i < kMpcWorlds; ++i) {
    const World w = test::random_world(rng);
    bool all = true;
    for (int h = 1; h <= kMaxMpcHorizon; ++h) {
      MpcParams p;
      p.horizon = h;
      all = all && mpc_plan(w, p) == test::brute_force(w, p).best.front();
    }
    exact += all ? 1 : 0;
  }
  return {
    exact == kMpcWorlds,
    std::to_string(exact) + "/" + std::to_string(kMpcWorlds) + " worlds agree for horizons 1..3"};
}

Verdict obb_oracle()
{
  std::mt19937_64 rng(4040);
  std::uniform_real_distribution<double> pos(-6.0, 6.0);
  std::uniform_real_distribution<double> heading(-std::numbers::pi, std::numbers::pi);
  int compared = 0;
  int disagreements = 0;
  int overlapping = 0;
  while (compared < kObbPairs) {
    const VehicleState a = test::box(pos(rng), pos(rng), heading(rng));
    const VehicleState b = test::box(pos(rng), pos(rng), heading(rng));
    if (!test::away_from_boundary(a, b, kObbBand)) {
      continue;
    }
    ++compared;
    const bool got = obb_overlap(a, b);
    overlapping += got ? 1 : 0;
    disagreements += got != test::sampled_overlap(a, b) ? 1 : 0;
  }
  return {
    disagreements == 0, std::to_string(disagreements) + " disagreements on " + std::to_string(compared) +
                          " pairs (" + std::to_string(overlapping) + " overlapping)"};
}

Verdict decoder_grammar()
{
  int round_trips = 0;
  for (MetaAction a : kAllMetaActions) {
    const std::string token(to_token(a));
    std::string lower = token;
    for (char & c : lower) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    for (const std::string & t : {token, lower}) {
      try {
        round_trips += decode_action("ACTION: " + t) == a ? 1 : 0;
      } catch (const DecodeError &) {
      }
    }
  }
  std::mt19937_64 rng(99);
  int rejected = 0;
  int false_accepts = 0;
  int accept_mismatch = 0;
  for (int i = 0; rejected < kFuzzRejections && i < 1'000'000; ++i) {
    const std::string text = test::mutate(rng);
    const auto expected = test::grammar_oracle(text);
    std::optional<MetaAction> got;
    try {
      got = decode_action(text);
    } catch (const DecodeError &) {
    }
    if (expected) {
      accept_mismatch += got != expected ? 1 : 0;
      continue;
    }
    ++rejected;
    false_accepts += got ? 1 : 0;
  }
  return {
    round_trips == 10 && rejected == kFuzzRejections && false_accepts == 0 && accept_mismatch == 0,
    std::to_string(round_trips) + "/10 round trips, " + std::to_string(rejected) + " fuzzed rejections, " +
      std::to_string(false_accepts) + " false accepts, " + std::to_string(accept_mismatch) +
      " mismatched accepts"};
}

Verdict idm_platoon()
{
  const double gap = test::idm_platoon_min_gap(kPlatoonSteps);
  return {gap > 0.0, "minimum bumper gap " + fmt("%.3f", gap) + " m over 10000 steps"};
}

Verdict metrics_fixtures()
{
  auto rec = [](MetaAction a, double ttc) { return DecisionRecord{0.0, a, false, ttc}; };
  auto ep = [](Outcome o, std::vector<DecisionRecord> d = {}) {
    EpisodeResult r;
    r.outcome = o;
    r.sim_time_elapsed = 20.0;
    r.decisions = std::move(d);
    return r;
  };
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const std::string & what) {
    if (!ok) {
      failed.push_back(what);
    }
  };
  std::vector<EpisodeResult> fifty(kEpisodes, ep(Outcome::success));
  fifty[0] = ep(Outcome::collision);
  fifty[1] = ep(Outcome::timeout);
  expect(aggregate(fifty).fail_pct == 4.0, "2/50 -> 4.0%");
  expect(aggregate(std::vector<EpisodeResult>(kEpisodes, ep(Outcome::success))).fail_pct == 0.0, "0/50 -> 0.0%");
  expect(
    count_ineffective(std::vector{rec(MetaAction::faster, 10.0), rec(MetaAction::slower, 10.0)}) == 1,
    "[FASTER,SLOWER] calm -> 1");
  expect(
    count_ineffective(std::vector{rec(MetaAction::faster, 10.0), rec(MetaAction::slower, 2.0)}) == 0,
    "[FASTER,SLOWER] threat -> 0");
  expect(
    count_ineffective(
      std::vector{rec(MetaAction::lane_left, 9.0), rec(MetaAction::idle, 9.0), rec(MetaAction::lane_right, 9.0)}) ==
      1,
    "[LANE_LEFT,IDLE,LANE_RIGHT] -> 1");
  const std::vector<EpisodeResult> mixed{
    ep(Outcome::success, {rec(MetaAction::faster, 9.0), rec(MetaAction::slower, 9.0), rec(MetaAction::idle, 9.0),
                          rec(MetaAction::idle, 9.0)}),
    ep(Outcome::agent_error)};
  const MetricsSummary m = aggregate(mixed);
  expect(m.fail_pct == 50.0 && m.inefficiency_pct == 25.0, "mixed -> 50.0% fail, 25.0% inefficiency");
  std::string detail = failed.empty() ? "6/6 fixtures exact" : "failed:";
  for (const auto & f : failed) {
    detail += " [" + f + "]";
  }
  return {failed.empty(), detail};
}

Verdict replay_integrity()
{
  ScriptedBackend scripted;
  test::StubServer stub([&](const httplib::Request & req, httplib::Response & res) {
    const auto r = llm::completion_request_from_json(nlohmann::json::parse(req.body));
    res.set_content(test::chat_body(scripted.complete(r)), "application/json");
  });
  ::setenv(llm::kEnvBaseUrl, stub.base_url().c_str(), 1);
  ::setenv(llm::kEnvModel, "stub", 1);
  const fs::path dir = scratch("replay");
  auto run = [&](const std::string & name, const char * mode) {
    std::string err;
    const int code = run_command(
      {"evaluate", "--scenario", "highway", "--agent", "cot-llm", "--episodes", std::to_string(kReplayEpisodes),
       "--jobs", "4", "--replay-cache", (dir / "cache").string(), "--cache-mode", mode, "--out",
       (dir / (name + ".csv")).string(), "--dump", (dir / (name + ".jsonl")).string()},
      &err);
    if (code != kExitOk) {
      throw std::runtime_error(name + " exited " + std::to_string(code) + ": " + err);
    }
  };
  try {
    run("record", "record");
    const std::size_t recorded = stub.requests().size();
    run("replay1", "replay");
    run("replay2", "replay");
    const std::size_t during_replay = stub.requests().size() - recorded;
    const std::string csv1 = slurp(dir / "replay1.csv");
    const bool identical = csv1 == slurp(dir / "replay2.csv") &&
                           slurp(dir / "replay1.jsonl") == slurp(dir / "replay2.jsonl");
    const bool matches_record = csv1 == slurp(dir / "record.csv");
    const bool no_errors = slurp(dir / "replay1.jsonl").find("agent_error") == std::string::npos;
    return {
      recorded > 0 && during_replay == 0 && identical && matches_record && no_errors,
      std::to_string(recorded) + " requests recorded, " + std::to_string(during_replay) +
        " during replay, replays " + (identical ? "byte-identical" : "DIFFER") +
        (matches_record ? ", equal to the recording run" : ", differ from the recording run") +
        (no_errors ? "" : ", agent errors present")};
  } catch (const std::exception & e) {
    return {false, e.what()};
  }
}

Verdict cot_ablation()
{
  std::string detail;
  bool ok = true;
  for (CotMode mode : {CotMode::chain, CotMode::single_stage}) {
    const auto results = evaluate(
      default_config(ScenarioKind::highway, 0), [mode] { return std::make_unique<ScriptedCotAgent>(mode); },
      kEpisodes, 0, 4);
    const MetricsSummary m = aggregate(results);
    ok = ok && m.episodes == static_cast<std::size_t>(kEpisodes) && m.agent_errors == 0 && m.fallbacks == 0 &&
         m.decisions > 0;
    detail += std::string(detail.empty() ? "" : "; ") + (mode == CotMode::chain ? "chain" : "single-stage") + ": " +
              std::to_string(m.decisions) + " decisions, " + std::to_string(m.fallbacks) + " fallbacks, fail " +
              fmt("%.1f", m.fail_pct) + "%";
  }
  return {ok, detail};
}

Verdict vqa_round_trip()
{
  const fs::path dir = scratch("vqa");
  std::string err;
  const int code = run_command(
    {"make-vqa", "--scenario", "highway", "--agent", "cot-scripted", "--episodes", std::to_string(kVqaEpisodes),
     "--max-decisions", "1", "--out", (dir / "vqa.jsonl").string()},
    &err);
  if (code != kExitOk) {
    return {false, "make-vqa exited " + std::to_string(code) + ": " + err};
  }
  const std::string text = slurp(dir / "vqa.jsonl");
  const auto records = parse_jsonl(text);
  const auto again = parse_jsonl(export_jsonl(records));
  std::size_t mismatches = records.size() == again.size() ? 0 : std::max(records.size(), again.size());
  for (std::size_t i = 0; i < std::min(records.size(), again.size()); ++i) {
    mismatches += records[i] == again[i] ? 0 : 1;
  }
  const bool bytes = export_jsonl(records) == text;
  return {
    records.size() == 3 * kVqaEpisodes && mismatches == 0 && bytes,
    std::to_string(records.size()) + " records, " + std::to_string(mismatches) + " mismatches, re-export " +
      (bytes ? "byte-identical" : "DIFFERS")};
}

}  // namespace

int main()
{
  const std::vector<Criterion> criteria{
    {1, "determinism", determinism},
    {2, "intersection safety ordering", safety_ordering},
    {3, "mpc exhaustive oracle", mpc_oracle},
    {4, "obb sampling oracle", obb_oracle},
    {5, "decoder grammar", decoder_grammar},
    {6, "idm platoon", idm_platoon},
    {7, "metrics fixtures", metrics_fixtures},
    {8, "replay integrity", replay_integrity},
    {9, "cot ablation harness", cot_ablation},
    {10, "vqa round trip", vqa_round_trip},
  };
  int failures = 0;
  for (const auto & c : criteria) {
    Verdict v{false, ""};
    try {
      v = c.check();
    } catch (const std::exception & e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << v.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
