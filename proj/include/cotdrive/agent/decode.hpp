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

#ifndef COTDRIVE__AGENT__DECODE_HPP_
#define COTDRIVE__AGENT__DECODE_HPP_

#include "cotdrive/sim/meta_action.hpp"

#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cotdrive
{

class DecodeError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

namespace detail
{

inline bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

inline std::string_view trim(std::string_view s)
{
  while (!s.empty() && is_blank(s.front())) {
    s.remove_prefix(1);
  }
  while (!s.empty() && is_blank(s.back())) {
    s.remove_suffix(1);
  }
  return s;
}

inline bool iequals_prefix(std::string_view s, std::string_view prefix)
{
  if (s.size() < prefix.size()) {
    return false;
  }
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(s[i])) != std::toupper(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

/// If the (trimmed) line starts with the ACTION keyword and a colon, returns what follows.
inline std::optional<std::string_view> action_payload(std::string_view line)
{
  std::string_view s = trim(line);
  if (!iequals_prefix(s, "ACTION")) {
    return std::nullopt;
  }
  s.remove_prefix(6);
  while (!s.empty() && is_blank(s.front())) {
    s.remove_prefix(1);
  }
  if (s.empty() || s.front() != ':') {
    return std::nullopt;
  }
  s.remove_prefix(1);
  return trim(s);
}

}  // namespace detail

/// Decodes the meta-action from a decision answer.
///
/// The last non-empty line of the form `ACTION: <TOKEN>` decides; keyword and
/// token are case-insensitive and surrounding whitespace is ignored. An
/// ACTION line carrying anything but one of the five tokens is an error, as
/// is an answer without any ACTION line.
inline MetaAction decode_action(std::string_view text)
{
  std::optional<std::string_view> last_line;
  std::optional<std::string_view> last_payload;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    const std::string_view line = text.substr(pos, end - pos);
    if (!detail::trim(line).empty()) {
      if (auto payload = detail::action_payload(line)) {
        last_line = line;
        last_payload = payload;
      }
    }
    if (nl == std::string_view::npos) {
      break;
    }
    pos = nl + 1;
  }
  if (!last_payload) {
    throw DecodeError("no 'ACTION: <TOKEN>' line in answer");
  }
  std::string token(*last_payload);
  for (char & c : token) {
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  const auto action = meta_action_from_token(token);
  if (!action) {
    throw DecodeError(
      "unknown action token in line '" + std::string(detail::trim(*last_line)) + "'");
  }
  return *action;
}

}  // namespace cotdrive

#endif  // COTDRIVE__AGENT__DECODE_HPP_
