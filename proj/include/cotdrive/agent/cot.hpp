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

#ifndef COTDRIVE__AGENT__COT_HPP_
#define COTDRIVE__AGENT__COT_HPP_

#include "cotdrive/agent/decode.hpp"
#include "cotdrive/agent/templates.hpp"
#include "cotdrive/llm/completion.hpp"
#include "cotdrive/scene/scene.hpp"

#include <string>
#include <vector>

namespace cotdrive
{

struct CotTurn
{
  CotStage stage{CotStage::decision};
  std::string question;
  std::string answer;

  bool operator==(const CotTurn &) const = default;
};

/// Transcript of one decision. A full chain holds three turns in stage order;
/// the single-stage ablation holds only the decision turn.
struct CoTExchange
{
  std::vector<CotTurn> stages;
  MetaAction action{MetaAction::slower};
  bool fallback_used{false};

  bool operator==(const CoTExchange &) const = default;
};

enum class CotMode { chain, single_stage };

/// Action used when the decision answer cannot be decoded after the retry.
inline constexpr MetaAction kFallbackAction = MetaAction::slower;

struct CotOptions
{
  CotMode mode{CotMode::chain};
  std::string model;
  double temperature{0.0};
  int max_tokens{512};
  // attached to every user message when set (vision backends)
  std::optional<std::string> image_url;
};

/// Runs the staged prompt chain against `backend`. llm::BackendError propagates.
inline CoTExchange run_cot(
  const SceneDescription & scene, llm::Completer & backend, const PromptTemplateSet & templates,
  const CotOptions & options = {})
{
  auto ask = [&](std::vector<llm::Message> messages) {
    llm::CompletionRequest req;
    req.model = options.model;
    req.messages = std::move(messages);
    req.temperature = options.temperature;
    req.max_tokens = options.max_tokens;
    return backend.complete(req);
  };
  auto user = [&](std::string content) {
    return llm::Message{"user", std::move(content), options.image_url};
  };
  const llm::Message system{"system", std::string(kSystemPrompt), std::nullopt};

  CoTExchange ex;
  std::string answer_1;
  std::string answer_2;
  if (options.mode == CotMode::chain) {
    CotTurn t1{CotStage::scene_understanding, templates.render(CotStage::scene_understanding, scene.text), {}};
    t1.answer = ask({system, user(t1.question)});
    answer_1 = t1.answer;
    CotTurn t2{CotStage::prediction, templates.render(CotStage::prediction, scene.text, answer_1), {}};
    t2.answer = ask({system, user(t2.question)});
    answer_2 = t2.answer;
    ex.stages.push_back(std::move(t1));
    ex.stages.push_back(std::move(t2));
  }
  CotTurn t3{
    CotStage::decision, templates.render(CotStage::decision, scene.text, answer_1, answer_2), {}};
  t3.answer = ask({system, user(t3.question)});
  try {
    ex.action = decode_action(t3.answer);
  } catch (const DecodeError &) {
    const std::string retry = ask(
      {system, user(t3.question), {"assistant", t3.answer, std::nullopt},
       user(std::string(kFormatReminder))});
    try {
      ex.action = decode_action(retry);
      t3.answer = retry;
    } catch (const DecodeError &) {
      ex.action = kFallbackAction;
      ex.fallback_used = true;
    }
  }
  ex.stages.push_back(std::move(t3));
  return ex;
}

}  // namespace cotdrive

#endif  // COTDRIVE__AGENT__COT_HPP_
