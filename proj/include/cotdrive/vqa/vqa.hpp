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

#ifndef COTDRIVE__VQA__VQA_HPP_
#define COTDRIVE__VQA__VQA_HPP_

#include "cotdrive/agent/cot.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cotdrive
{

/// What the question is asked about: a rendered image on disk or the scene text itself.
struct VqaVisual
{
  enum class Kind { image, scene };

  Kind kind{Kind::scene};
  std::string value;  // image path or scene text

  static VqaVisual image(std::string path) { return {Kind::image, std::move(path)}; }
  static VqaVisual scene(std::string text) { return {Kind::scene, std::move(text)}; }

  bool operator==(const VqaVisual &) const = default;
};

struct VqaRecord
{
  std::uint64_t id{0};
  VqaVisual visual;
  CotStage stage{CotStage::scene_understanding};
  std::string question;
  std::string answer;

  bool operator==(const VqaRecord &) const = default;
};

class VqaError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline CotStage cot_stage_from_string(std::string_view s)
{
  for (CotStage stage : kCotStages) {
    if (to_string(stage) == s) {
      return stage;
    }
  }
  throw VqaError("unknown stage '" + std::string(s) + "'");
}

inline void validate(const VqaRecord & r)
{
  if (r.question.empty()) {
    throw VqaError("record " + std::to_string(r.id) + ": empty question");
  }
  if (r.answer.empty()) {
    throw VqaError("record " + std::to_string(r.id) + ": empty answer");
  }
}

/// One record per stage of a full chain, ids id_base .. id_base + 2.
inline std::vector<VqaRecord> build_vqa_records(
  const CoTExchange & exchange, const VqaVisual & visual, std::uint64_t id_base)
{
  if (exchange.stages.size() != kCotStages.size()) {
    throw std::invalid_argument(
      "build_vqa_records: exchange has " + std::to_string(exchange.stages.size()) +
      " stages, a full chain has 3");
  }
  std::vector<VqaRecord> records;
  for (std::size_t i = 0; i < kCotStages.size(); ++i) {
    const CotTurn & turn = exchange.stages[i];
    if (turn.stage != kCotStages[i]) {
      throw std::invalid_argument("build_vqa_records: stages out of order");
    }
    records.push_back({id_base + i, visual, turn.stage, turn.question, turn.answer});
  }
  return records;
}

inline nlohmann::json to_json(const VqaVisual & v)
{
  if (v.kind == VqaVisual::Kind::image) {
    return {{"type", "image"}, {"path", v.value}};
  }
  return {{"type", "scene"}, {"text", v.value}};
}

inline nlohmann::json to_json(const VqaRecord & r)
{
  return {
    {"id", r.id},
    {"visual", to_json(r.visual)},
    {"stage", to_string(r.stage)},
    {"question", r.question},
    {"answer", r.answer},
  };
}

namespace detail
{

inline VqaVisual vqa_visual_from_json(const nlohmann::json & j)
{
  if (!j.is_object() || j.size() != 2) {
    throw VqaError("visual must be an object with 'type' and one payload key");
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "image") {
    return VqaVisual::image(j.at("path").get<std::string>());
  }
  if (type == "scene") {
    return VqaVisual::scene(j.at("text").get<std::string>());
  }
  throw VqaError("unknown visual type '" + type + "'");
}

inline VqaRecord vqa_record_from_json(const nlohmann::json & j)
{
  if (!j.is_object()) {
    throw VqaError("line is not a JSON object");
  }
  for (const auto & [key, value] : j.items()) {
    if (key != "id" && key != "visual" && key != "stage" && key != "question" && key != "answer") {
      throw VqaError("unexpected key '" + key + "'");
    }
  }
  const auto & id = j.at("id");
  if (!id.is_number_unsigned()) {
    throw VqaError("id must be a non-negative integer");
  }
  VqaRecord r;
  r.id = id.get<std::uint64_t>();
  r.visual = vqa_visual_from_json(j.at("visual"));
  r.stage = cot_stage_from_string(j.at("stage").get<std::string>());
  r.question = j.at("question").get<std::string>();
  r.answer = j.at("answer").get<std::string>();
  validate(r);
  return r;
}

}  // namespace detail

/// One compact JSON object per record, LF-terminated, keys in sorted order.
inline std::string export_jsonl(const std::vector<VqaRecord> & records)
{
  std::string out;
  for (const VqaRecord & r : records) {
    validate(r);
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

/// Inverse of export_jsonl. Blank lines are skipped; errors name the 1-based line.
inline std::vector<VqaRecord> parse_jsonl(std::string_view text)
{
  std::vector<VqaRecord> records;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      continue;
    }
    try {
      records.push_back(detail::vqa_record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception & e) {
      throw VqaError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

}  // namespace cotdrive

#endif  // COTDRIVE__VQA__VQA_HPP_
