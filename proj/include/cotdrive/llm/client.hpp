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

#ifndef COTDRIVE__LLM__CLIENT_HPP_
#define COTDRIVE__LLM__CLIENT_HPP_

#include "cotdrive/llm/completion.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <regex>
#include <stdexcept>
#include <string>
#include <thread>

namespace cotdrive::llm
{

inline constexpr const char * kEnvBaseUrl = "AD_LLM_BASE_URL";
inline constexpr const char * kEnvApiKey = "AD_LLM_API_KEY";
inline constexpr const char * kEnvModel = "AD_LLM_MODEL";

struct ClientConfig
{
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string api_key;   // sent as a bearer token when non-empty
  std::string model;     // used when a request leaves the model empty
  std::chrono::milliseconds timeout{60'000};
  int max_retries{2};
  std::chrono::milliseconds backoff{500};  // doubled after every failed attempt

  /// Reads AD_LLM_BASE_URL (required), AD_LLM_API_KEY and AD_LLM_MODEL.
  static ClientConfig from_env()
  {
    auto env = [](const char * name) {
      const char * v = std::getenv(name);
      return v == nullptr ? std::string{} : std::string(v);
    };
    ClientConfig c;
    c.base_url = env(kEnvBaseUrl);
    c.api_key = env(kEnvApiKey);
    c.model = env(kEnvModel);
    if (c.base_url.empty()) {
      throw std::invalid_argument(std::string(kEnvBaseUrl) + " is not set");
    }
    return c;
  }
};

namespace detail
{

struct Endpoint
{
  std::string origin;  // scheme://host[:port]
  std::string path;    // chat-completions path including any base prefix
};

inline Endpoint chat_endpoint(const std::string & base_url)
{
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(base_url, m, re)) {
    throw std::invalid_argument("base URL '" + base_url + "' is not an http(s) URL");
  }
  std::string prefix = m[2].str();
  while (!prefix.empty() && prefix.back() == '/') {
    prefix.pop_back();
  }
  return {m[1].str(), prefix + "/chat/completions"};
}

inline bool is_timeout(httplib::Error e)
{
  return e == httplib::Error::Read || e == httplib::Error::Write ||
         e == httplib::Error::ConnectionTimeout;
}

inline std::string extract_content(const std::string & body)
{
  try {
    const auto j = nlohmann::json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception & e) {
    throw BackendError(std::string("malformed response body: ") + e.what());
  }
}

}  // namespace detail

/// Chat-completions client over HTTP. Retries timeouts and 5xx answers with
/// exponential backoff; any other failure is raised at once.
class HttpCompleter : public Completer
{
public:
  explicit HttpCompleter(ClientConfig config)
  : config_(std::move(config)), endpoint_(detail::chat_endpoint(config_.base_url))
  {
    if (config_.max_retries < 0) {
      throw std::invalid_argument("max_retries must be >= 0");
    }
  }

  const ClientConfig & config() const { return config_; }

  std::string complete(const CompletionRequest & request) override
  {
    request.validate();
    nlohmann::json body = to_json(request);
    if (request.model.empty()) {
      body["model"] = config_.model;
    }
    const std::string payload = body.dump();

    // one client per call keeps concurrent episodes independent
    httplib::Client cli(endpoint_.origin);
    if (!cli.is_valid()) {
      throw BackendError("cannot open a client for '" + endpoint_.origin + "'");
    }
    cli.set_connection_timeout(config_.timeout);
    cli.set_read_timeout(config_.timeout);
    cli.set_write_timeout(config_.timeout);
    httplib::Headers headers;
    if (!config_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + config_.api_key);
    }

    auto delay = config_.backoff;
    for (int attempt = 0;; ++attempt) {
      const bool last = attempt >= config_.max_retries;
      auto res = cli.Post(endpoint_.path, headers, payload, "application/json");
      if (!res) {
        const httplib::Error err = res.error();
        if (!detail::is_timeout(err) || last) {
          throw BackendError(
            "request to " + endpoint_.origin + endpoint_.path + " failed: " + httplib::to_string(err));
        }
      } else if (res->status >= 200 && res->status < 300) {
        return detail::extract_content(res->body);
      } else if (res->status < 500 || last) {
        throw BackendError(
          "request to " + endpoint_.origin + endpoint_.path + " returned HTTP " +
          std::to_string(res->status));
      }
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
  }

private:
  ClientConfig config_;
  detail::Endpoint endpoint_;
};

}  // namespace cotdrive::llm

#endif  // COTDRIVE__LLM__CLIENT_HPP_
