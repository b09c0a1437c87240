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

#ifndef COTDRIVE__AGENT__TEMPLATES_HPP_
#define COTDRIVE__AGENT__TEMPLATES_HPP_

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cotdrive
{

enum class CotStage { scene_understanding, prediction, decision };

inline constexpr std::array<CotStage, 3> kCotStages{
  CotStage::scene_understanding, CotStage::prediction, CotStage::decision};

inline std::string_view to_string(CotStage stage)
{
  switch (stage) {
    case CotStage::scene_understanding:
      return "scene_understanding";
    case CotStage::prediction:
      return "prediction";
    case CotStage::decision:
      return "decision";
  }
  return "?";
}

/// Required verbatim at the end of every decision template.
inline constexpr std::string_view kFormatInstruction =
  "Finish with a final line of the form ACTION: <TOKEN>, where <TOKEN> is one of "
  "LANE_LEFT, IDLE, LANE_RIGHT, FASTER, SLOWER.";

inline constexpr std::string_view kFormatReminder =
  "Your previous answer did not end with a valid action line. Answer again. "
  "Finish with a final line of the form ACTION: <TOKEN>, where <TOKEN> is one of "
  "LANE_LEFT, IDLE, LANE_RIGHT, FASTER, SLOWER.";

inline constexpr std::string_view kSystemPrompt =
  "You are the decision module of an automated vehicle. You receive a description of the "
  "traffic scene around the ego vehicle and reason about it step by step.";

class TemplateError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Stage prompts with the placeholders {scene}, {answer_1} and {answer_2}.
class PromptTemplateSet
{
public:
  PromptTemplateSet(std::string scene_understanding, std::string prediction, std::string decision)
  : templates_{std::move(scene_understanding), std::move(prediction), std::move(decision)}
  {
    if (templates_[2].find(kFormatInstruction) == std::string::npos) {
      throw TemplateError("decision template must contain the action format instruction");
    }
    for (const auto & t : templates_) {
      if (t.find("{scene}") == std::string::npos) {
        throw TemplateError("every stage template must contain {scene}");
      }
    }
  }

  const std::string & get(CotStage stage) const { return templates_[static_cast<int>(stage)]; }

  /// Substitutes known placeholders; anything else in braces is left alone.
  std::string render(
    CotStage stage, std::string_view scene, std::string_view answer_1 = {},
    std::string_view answer_2 = {}) const
  {
    const std::map<std::string_view, std::string_view> values{
      {"{scene}", scene}, {"{answer_1}", answer_1}, {"{answer_2}", answer_2}};
    const std::string & t = get(stage);
    std::string out;
    std::size_t pos = 0;
    while (pos < t.size()) {
      const auto open = t.find('{', pos);
      if (open == std::string::npos) {
        out.append(t, pos);
        break;
      }
      out.append(t, pos, open - pos);
      bool replaced = false;
      for (const auto & [key, value] : values) {
        if (t.compare(open, key.size(), key) == 0) {
          out.append(value);
          pos = open + key.size();
          replaced = true;
          break;
        }
      }
      if (!replaced) {
        out.push_back('{');
        pos = open + 1;
      }
    }
    return out;
  }

  static PromptTemplateSet defaults()
  {
    return PromptTemplateSet(
      "Step 1 of 3: scene understanding.\n"
      "{scene}\n"
      "Describe the road, the conditions, the ego vehicle's lane and speed, and every "
      "nearby vehicle.",
      "Step 2 of 3: prediction.\n"
      "{scene}\n"
      "Your scene understanding:\n{answer_1}\n"
      "Predict how the nearby vehicles will move over the next few seconds and name any "
      "vehicle that threatens the ego vehicle.",
      "Step 3 of 3: decision.\n"
      "{scene}\n"
      "Your scene understanding:\n{answer_1}\n"
      "Your prediction:\n{answer_2}\n"
      "Decide the ego vehicle's next meta-action and explain why in one or two sentences.\n" +
        std::string(kFormatInstruction));
  }

  /// Loads scene_understanding.txt, prediction.txt and decision.txt from `dir`.
  static PromptTemplateSet load(const std::filesystem::path & dir)
  {
    auto read = [&](const char * name) {
      std::ifstream in(dir / name, std::ios::binary);
      if (!in) {
        throw TemplateError("cannot read template " + (dir / name).string());
      }
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    return PromptTemplateSet(read("scene_understanding.txt"), read("prediction.txt"), read("decision.txt"));
  }

private:
  std::array<std::string, 3> templates_;
};

}  // namespace cotdrive

#endif  // COTDRIVE__AGENT__TEMPLATES_HPP_
