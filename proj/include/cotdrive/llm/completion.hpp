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

#ifndef COTDRIVE__LLM__COMPLETION_HPP_
#define COTDRIVE__LLM__COMPLETION_HPP_

#include <nlohmann/json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cotdrive::llm
{

struct Message
{
  std::string role;  // system | user | assistant
  std::string content;
  // data URL (e.g. "data:image/png;base64,...") forwarded to vision backends
  std::optional<std::string> image_url;

  bool operator==(const Message &) const = default;
};

struct CompletionRequest
{
  std::string model;
  std::vector<Message> messages;
  double temperature{0.0};
  int max_tokens{512};

  bool operator==(const CompletionRequest &) const = default;

  void validate() const
  {
    if (messages.empty()) {
      throw std::invalid_argument("completion request needs at least one message");
    }
    if (!(temperature >= 0.0)) {
      throw std::invalid_argument("temperature must be >= 0");
    }
    for (const auto & m : messages) {
      if (m.role != "system" && m.role != "user" && m.role != "assistant") {
        throw std::invalid_argument("unknown message role '" + m.role + "'");
      }
    }
  }
};

/// Raised when a backend cannot produce an answer (transport, protocol, cache miss).
class BackendError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Anything that turns a chat transcript into the assistant's next message.
/// Implementations must tolerate concurrent calls.
class Completer
{
public:
  virtual ~Completer() = default;
  virtual std::string complete(const CompletionRequest & request) = 0;
};

/// Chat-completions wire body. Object keys serialize in sorted order.
inline nlohmann::json to_json(const CompletionRequest & r)
{
  nlohmann::json messages = nlohmann::json::array();
  for (const auto & m : r.messages) {
    if (m.image_url) {
      messages.push_back({
        {"role", m.role},
        {"content",
         {{{"type", "text"}, {"text", m.content}},
          {{"type", "image_url"}, {"image_url", {{"url", *m.image_url}}}}}},
      });
    } else {
      messages.push_back({{"role", m.role}, {"content", m.content}});
    }
  }
  return {
    {"model", r.model},
    {"messages", messages},
    {"temperature", r.temperature},
    {"max_tokens", r.max_tokens},
  };
}

inline CompletionRequest completion_request_from_json(const nlohmann::json & j)
{
  CompletionRequest r;
  r.model = j.at("model").get<std::string>();
  r.temperature = j.at("temperature").get<double>();
  r.max_tokens = j.at("max_tokens").get<int>();
  for (const auto & m : j.at("messages")) {
    Message msg;
    msg.role = m.at("role").get<std::string>();
    const auto & content = m.at("content");
    if (content.is_string()) {
      msg.content = content.get<std::string>();
    } else {
      for (const auto & part : content) {
        if (part.at("type") == "text") {
          msg.content = part.at("text").get<std::string>();
        } else if (part.at("type") == "image_url") {
          msg.image_url = part.at("image_url").at("url").get<std::string>();
        }
      }
    }
    r.messages.push_back(std::move(msg));
  }
  return r;
}

}  // namespace cotdrive::llm

#endif  // COTDRIVE__LLM__COMPLETION_HPP_
