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

#ifndef COTDRIVE__EVAL__AGENTS_HPP_
#define COTDRIVE__EVAL__AGENTS_HPP_

#include "cotdrive/agent/cot.hpp"
#include "cotdrive/agent/scripted_backend.hpp"
#include "cotdrive/baselines/greedy.hpp"
#include "cotdrive/baselines/mpc.hpp"
#include "cotdrive/scene/scene.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>

namespace cotdrive
{

struct Decision
{
  MetaAction action{MetaAction::idle};
  bool fallback_used{false};
  std::optional<CoTExchange> exchange;
};

/// Something that picks a meta-action once per decision period. Planners read
/// the world directly; language agents only see the serialized scene.
class Agent
{
public:
  virtual ~Agent() = default;
  virtual Decision decide(const World & world, const SceneDescription & scene) = 0;
};

class CotAgent : public Agent
{
public:
  /// `backend` must outlive the agent and tolerate concurrent calls.
  CotAgent(llm::Completer & backend, PromptTemplateSet templates, CotOptions options = {})
  : backend_(backend), templates_(std::move(templates)), options_(std::move(options))
  {
  }

  Decision decide(const World &, const SceneDescription & scene) override
  {
    CoTExchange ex = run_cot(scene, backend_, templates_, options_);
    Decision d{ex.action, ex.fallback_used, std::nullopt};
    d.exchange = std::move(ex);
    return d;
  }

private:
  llm::Completer & backend_;
  PromptTemplateSet templates_;
  CotOptions options_;
};

/// Chain-of-thought agent on a private scripted backend.
class ScriptedCotAgent : public Agent
{
public:
  explicit ScriptedCotAgent(
    CotMode mode = CotMode::chain, PromptTemplateSet templates = PromptTemplateSet::defaults())
  : inner_(backend_, std::move(templates), CotOptions{mode, "scripted", 0.0, 512, std::nullopt})
  {
  }

  Decision decide(const World & world, const SceneDescription & scene) override
  {
    return inner_.decide(world, scene);
  }

private:
  ScriptedBackend backend_;
  CotAgent inner_;
};

class MpcAgent : public Agent
{
public:
  explicit MpcAgent(MpcParams params = {}) : params_(std::move(params)) { params_.validate(); }

  Decision decide(const World & world, const SceneDescription &) override
  {
    return {mpc_plan(world, params_), false, std::nullopt};
  }

private:
  MpcParams params_;
};

class GreedyAgent : public Agent
{
public:
  Decision decide(const World & world, const SceneDescription &) override
  {
    return {greedy_time_policy(world), false, std::nullopt};
  }
};

}  // namespace cotdrive

#endif  // COTDRIVE__EVAL__AGENTS_HPP_
