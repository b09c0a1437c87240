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

#ifndef COTDRIVE__CLI__CLI_HPP_
#define COTDRIVE__CLI__CLI_HPP_

#include "cotdrive/eval/evaluate.hpp"
#include "cotdrive/eval/report.hpp"
#include "cotdrive/llm/client.hpp"
#include "cotdrive/llm/replay_cache.hpp"
#include "cotdrive/scene/raster.hpp"
#include "cotdrive/sim/serialize.hpp"
#include "cotdrive/vqa/vqa.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cotdrive
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

struct CliConfig
{
  std::string command;
  std::string scenario;  // a kind name, or "all" for evaluate
  std::string agent{"cot-scripted"};
  int episodes{50};
  std::uint64_t seed{0};
  int jobs{1};
  std::string out;        // stdout when empty
  std::string markdown;   // evaluate only
  std::string dump;       // evaluate only: per-episode JSONL
  std::string config;     // scenario JSON document
  std::string templates;  // prompt template directory
  std::string model;      // cot-llm model name; AD_LLM_MODEL when empty
  std::string replay_cache;
  std::string cache_mode{"record"};
  std::string images;     // make-vqa only: directory for rendered frames
  int max_decisions{0};   // make-vqa only: per episode, 0 = all
};

/// Raised for bad flag values that CLI11 cannot check on its own.
class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

namespace cli_detail
{

inline std::string valid_agent_list()
{
  std::string s;
  for (auto id : kAgentIds) {
    s += (s.empty() ? "" : ", ") + std::string(id);
  }
  return s;
}

inline std::vector<std::string> resolve_agents(const std::string & agent, bool allow_all)
{
  if (allow_all && agent == "all") {
    return {kAgentIds.begin(), kAgentIds.end()};
  }
  for (auto id : kAgentIds) {
    if (id == agent) {
      return {agent};
    }
  }
  throw UsageError(
    "unknown agent '" + agent + "'; valid ids: " + valid_agent_list() + (allow_all ? ", all" : ""));
}

inline std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_output(const std::string & path, const std::string & content, std::ostream & out)
{
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << content;
  if (!f) {
    throw std::runtime_error("cannot write " + path);
  }
}

struct ScenarioSetup
{
  ScenarioConfig config;
  MpcParams mpc;
};

inline std::vector<ScenarioSetup> resolve_scenarios(const CliConfig & c, bool allow_all)
{
  if (!c.config.empty()) {
    const auto doc = nlohmann::json::parse(read_file(c.config));
    ScenarioSetup s{scenario_config_from_json(doc), mpc_params_from_json(doc)};
    if (!c.scenario.empty() && c.scenario != to_string(s.config.kind)) {
      throw UsageError("--scenario '" + c.scenario + "' contradicts the kind in " + c.config);
    }
    return {s};
  }
  if (c.scenario.empty()) {
    throw UsageError("--scenario or --config is required");
  }
  if (allow_all && c.scenario == "all") {
    std::vector<ScenarioSetup> all;
    for (ScenarioKind k : kAllScenarioKinds) {
      all.push_back({default_config(k), {}});
    }
    return all;
  }
  const auto kind = scenario_kind_from_string(c.scenario);
  if (!kind) {
    throw UsageError(
      "unknown scenario '" + c.scenario + "'; valid: intersection, roundabout, highway, merge" +
      (allow_all ? ", all" : ""));
  }
  return {{default_config(*kind), {}}};
}

/// Owns the language backend shared by every cot-llm agent of a run.
class Backends
{
public:
  explicit Backends(const CliConfig & c) : c_(c)
  {
    mode_ = llm::cache_mode_from_string(c.cache_mode);
  }

  llm::Completer & llm_backend()
  {
    if (top_ != nullptr) {
      return *top_;
    }
    if (c_.replay_cache.empty()) {
      http_ = std::make_unique<llm::HttpCompleter>(llm::ClientConfig::from_env());
      top_ = http_.get();
    } else if (mode_ == llm::CacheMode::replay) {
      cache_ = std::make_unique<llm::ReplayCache>(nullptr, c_.replay_cache, mode_);
      top_ = cache_.get();
    } else {
      http_ = std::make_unique<llm::HttpCompleter>(llm::ClientConfig::from_env());
      cache_ = std::make_unique<llm::ReplayCache>(http_.get(), c_.replay_cache, mode_);
      top_ = cache_.get();
    }
    return *top_;
  }

  std::string model() const
  {
    if (!c_.model.empty()) {
      return c_.model;
    }
    const char * env = std::getenv(llm::kEnvModel);
    return env == nullptr ? std::string{} : std::string(env);
  }

private:
  const CliConfig & c_;
  llm::CacheMode mode_{llm::CacheMode::record};
  std::unique_ptr<llm::HttpCompleter> http_;
  std::unique_ptr<llm::ReplayCache> cache_;
  llm::Completer * top_{nullptr};
};

inline AgentFactory make_factory(
  const std::string & agent, const MpcParams & mpc, const PromptTemplateSet & templates, Backends & backends)
{
  if (agent == "greedy") {
    return [] { return std::make_unique<GreedyAgent>(); };
  }
  if (agent == "mpc") {
    return [mpc] { return std::make_unique<MpcAgent>(mpc); };
  }
  if (agent == "cot-scripted") {
    return [templates] { return std::make_unique<ScriptedCotAgent>(CotMode::chain, templates); };
  }
  CotOptions options;
  options.mode = agent == "cot-llm-nocot" ? CotMode::single_stage : CotMode::chain;
  options.model = backends.model();
  llm::Completer & backend = backends.llm_backend();
  return [&backend, templates, options] {
    return std::make_unique<CotAgent>(backend, templates, options);
  };
}

inline PromptTemplateSet load_templates(const CliConfig & c)
{
  return c.templates.empty() ? PromptTemplateSet::defaults() : PromptTemplateSet::load(c.templates);
}

inline void require_positive(int v, const char * flag)
{
  if (v < 1) {
    throw UsageError(std::string(flag) + " must be >= 1");
  }
}

inline int cmd_simulate(const CliConfig & c, std::ostream & out)
{
  const std::string agent = resolve_agents(c.agent, false).front();
  const ScenarioSetup setup = resolve_scenarios(c, false).front();
  Backends backends(c);
  auto make = make_factory(agent, setup.mpc, load_templates(c), backends);
  ScenarioConfig config = setup.config;
  config.seed = c.seed;
  auto a = make();
  nlohmann::json j = to_json(run_episode(config, *a));
  j["method"] = agent;
  write_output(c.out, j.dump(2) + "\n", out);
  return kExitOk;
}

inline int cmd_evaluate(const CliConfig & c, std::ostream & out)
{
  require_positive(c.episodes, "--episodes");
  require_positive(c.jobs, "--jobs");
  const auto agents = resolve_agents(c.agent, true);
  const auto setups = resolve_scenarios(c, true);
  const PromptTemplateSet templates = load_templates(c);
  Backends backends(c);

  std::vector<ReportRow> rows;
  std::string dump;
  for (const ScenarioSetup & s : setups) {
    for (const std::string & agent : agents) {
      const auto results =
        evaluate(s.config, make_factory(agent, s.mpc, templates, backends), c.episodes, c.seed, c.jobs);
      rows.push_back({s.config.kind, agent, aggregate(results)});
      for (const auto & r : results) {
        nlohmann::json j = to_json(r);
        j["method"] = agent;
        dump += j.dump() + "\n";
      }
    }
  }
  write_output(c.out, emit_csv(rows), out);
  if (!c.markdown.empty()) {
    write_output(c.markdown, emit_markdown(rows), out);
  }
  if (!c.dump.empty()) {
    write_output(c.dump, dump, out);
  }
  return kExitOk;
}

inline int cmd_make_vqa(const CliConfig & c, std::ostream & out)
{
  require_positive(c.episodes, "--episodes");
  if (c.max_decisions < 0) {
    throw UsageError("--max-decisions must be >= 0");
  }
  const std::string agent = resolve_agents(c.agent, false).front();
  if (agent != "cot-scripted" && agent != "cot-llm") {
    throw UsageError("make-vqa needs a chain-of-thought agent (cot-scripted or cot-llm)");
  }
  const ScenarioSetup setup = resolve_scenarios(c, false).front();
  Backends backends(c);
  auto make = make_factory(agent, setup.mpc, load_templates(c), backends);
  if (!c.images.empty()) {
    std::filesystem::create_directories(c.images);
  }

  std::vector<VqaRecord> records;
  for (int i = 0; i < c.episodes; ++i) {
    ScenarioConfig config = setup.config;
    config.seed = c.seed + static_cast<std::uint64_t>(i);
    auto a = make();
    int taken = 0;
    auto observer = [&](const World & world, const SceneDescription & scene, const Decision & d) {
      if (!d.exchange || (c.max_decisions > 0 && taken >= c.max_decisions)) {
        return;
      }
      VqaVisual visual = VqaVisual::scene(scene.text);
      if (!c.images.empty()) {
        const auto path = std::filesystem::path(c.images) /
                          ("seed" + std::to_string(config.seed) + "_d" + std::to_string(taken) + ".ppm");
        const auto bytes =
          rasterize_topdown(world, Viewport{world.ego().position, 100.0, 100.0}, ImageSize{256, 256});
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        visual = VqaVisual::image(path.string());
      }
      auto built = build_vqa_records(*d.exchange, visual, records.size());
      records.insert(records.end(), built.begin(), built.end());
      ++taken;
    };
    run_episode(config, *a, observer);
  }
  write_output(c.out, export_jsonl(records), out);
  return kExitOk;
}

inline int cmd_replay_show(const CliConfig & c, std::ostream & out)
{
  if (c.replay_cache.empty()) {
    throw UsageError("--replay-cache is required");
  }
  std::string text;
  for (const auto & e : llm::load_cache_entries(c.replay_cache)) {
    text += to_json(e).dump() + "\n";
  }
  write_output(c.out, text, out);
  return kExitOk;
}

}  // namespace cli_detail

/// Entry point behind the cotdrive command. Exit codes: 0 success, 1 usage
/// error, 2 runtime failure.
inline int run_cli(int argc, const char * const * argv, std::ostream & out = std::cout,
                   std::ostream & err = std::cerr)
{
  CliConfig c;
  CLI::App app{"Chain-of-thought driving agents in a small traffic simulator", "cotdrive"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  auto add_scenario = [&](CLI::App * sub, bool allow_all) {
    sub->add_option("--scenario", c.scenario,
                    allow_all ? "intersection | roundabout | highway | merge | all"
                              : "intersection | roundabout | highway | merge");
    sub->add_option("--config", c.config, "scenario JSON document (may carry an \"mpc\" object)");
    sub->add_option("--seed", c.seed, "base seed");
  };
  auto add_agent = [&](CLI::App * sub, const std::string & help) {
    sub->add_option("--agent", c.agent, help);
    sub->add_option("--templates", c.templates, "prompt template directory");
    sub->add_option("--model", c.model, "model name for cot-llm (default: $AD_LLM_MODEL)");
    sub->add_option("--replay-cache", c.replay_cache, "transcript cache directory");
    sub->add_option("--cache-mode", c.cache_mode, "record | replay")
      ->check(CLI::IsMember({"record", "replay"}));
  };

  auto * simulate = app.add_subcommand("simulate", "run one episode and print its JSON result");
  add_scenario(simulate, false);
  add_agent(simulate, "agent id: " + cli_detail::valid_agent_list());
  simulate->add_option("--out", c.out, "output file (default: stdout)");

  auto * evaluate_cmd = app.add_subcommand("evaluate", "seed sweep with a CSV/Markdown report");
  add_scenario(evaluate_cmd, true);
  add_agent(evaluate_cmd, "agent id or all: " + cli_detail::valid_agent_list());
  evaluate_cmd->add_option("--episodes", c.episodes, "episodes per scenario and agent");
  evaluate_cmd->add_option("--jobs", c.jobs, "worker threads");
  evaluate_cmd->add_option("--out", c.out, "CSV report (default: stdout)");
  evaluate_cmd->add_option("--markdown", c.markdown, "Markdown table output");
  evaluate_cmd->add_option("--dump", c.dump, "per-episode JSONL output");

  auto * make_vqa = app.add_subcommand("make-vqa", "collect chain-of-thought exchanges as JSONL records");
  add_scenario(make_vqa, false);
  add_agent(make_vqa, "cot-scripted | cot-llm");
  make_vqa->add_option("--episodes", c.episodes, "episodes");
  make_vqa->add_option("--max-decisions", c.max_decisions, "decisions kept per episode (0 = all)");
  make_vqa->add_option("--images", c.images, "write top-down PPM frames here and reference them");
  make_vqa->add_option("--out", c.out, "JSONL output (default: stdout)");

  auto * replay_show = app.add_subcommand("replay-show", "print cached transcripts as JSONL");
  replay_show->add_option("--replay-cache", c.replay_cache, "transcript cache directory")->required();
  replay_show->add_option("--out", c.out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      return cli_detail::cmd_simulate(c, out);
    }
    if (evaluate_cmd->parsed()) {
      return cli_detail::cmd_evaluate(c, out);
    }
    if (make_vqa->parsed()) {
      return cli_detail::cmd_make_vqa(c, out);
    }
    return cli_detail::cmd_replay_show(c, out);
  } catch (const UsageError & e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception & e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace cotdrive

#endif  // COTDRIVE__CLI__CLI_HPP_
