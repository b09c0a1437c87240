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

#ifndef COTDRIVE__LLM__REPLAY_CACHE_HPP_
#define COTDRIVE__LLM__REPLAY_CACHE_HPP_

#include "cotdrive/llm/completion.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace cotdrive::llm
{

enum class CacheMode { record, replay };

inline std::string_view to_string(CacheMode m)
{
  return m == CacheMode::record ? "record" : "replay";
}

inline CacheMode cache_mode_from_string(std::string_view s)
{
  if (s == "record") {
    return CacheMode::record;
  }
  if (s == "replay") {
    return CacheMode::replay;
  }
  throw std::invalid_argument("unknown cache mode '" + std::string(s) + "' (record | replay)");
}

inline std::string sha256_hex(std::string_view data)
{
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

/// Compact dump with sorted object keys; string bytes are kept as they are.
inline std::string canonical_request(const CompletionRequest & r)
{
  return to_json(r).dump();
}

inline std::string cache_key(const CompletionRequest & r)
{
  return sha256_hex(canonical_request(r));
}

struct CacheEntry
{
  std::string key;
  CompletionRequest request;
  std::string answer;
};

inline nlohmann::json to_json(const CacheEntry & e)
{
  return {{"key", e.key}, {"request", to_json(e.request)}, {"answer", e.answer}};
}

inline CacheEntry read_cache_entry(const std::filesystem::path & file)
{
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw BackendError("cannot open cache entry " + file.string());
  }
  try {
    const auto j = nlohmann::json::parse(in);
    return {
      j.at("key").get<std::string>(), completion_request_from_json(j.at("request")),
      j.at("answer").get<std::string>()};
  } catch (const nlohmann::json::exception & e) {
    throw BackendError("corrupt cache entry " + file.string() + ": " + e.what());
  }
}

/// Every entry under `dir`, sorted by key.
inline std::vector<CacheEntry> load_cache_entries(const std::filesystem::path & dir)
{
  std::vector<CacheEntry> entries;
  if (!std::filesystem::is_directory(dir)) {
    throw BackendError("cache directory " + dir.string() + " does not exist");
  }
  for (const auto & f : std::filesystem::directory_iterator(dir)) {
    if (f.is_regular_file() && f.path().extension() == ".json") {
      entries.push_back(read_cache_entry(f.path()));
    }
  }
  std::sort(entries.begin(), entries.end(), [](const auto & a, const auto & b) { return a.key < b.key; });
  return entries;
}

/// Completer that records transcripts to `<dir>/<key>.json` or serves them
/// back without touching the inner backend.
class ReplayCache : public Completer
{
public:
  /// `inner` may be null in replay mode. It must outlive the cache.
  ReplayCache(Completer * inner, std::filesystem::path dir, CacheMode mode)
  : inner_(inner), dir_(std::move(dir)), mode_(mode)
  {
    if (mode_ == CacheMode::record) {
      if (inner_ == nullptr) {
        throw std::invalid_argument("record mode needs an inner completer");
      }
      std::filesystem::create_directories(dir_);
    }
  }

  CacheMode mode() const { return mode_; }
  const std::filesystem::path & dir() const { return dir_; }

  std::filesystem::path entry_path(const std::string & key) const { return dir_ / (key + ".json"); }

  std::string complete(const CompletionRequest & request) override
  {
    request.validate();
    const std::string key = cache_key(request);
    if (mode_ == CacheMode::replay) {
      const auto path = entry_path(key);
      if (!std::filesystem::exists(path)) {
        throw BackendError("replay cache miss for key " + key);
      }
      CacheEntry e = read_cache_entry(path);
      if (e.key != key) {
        throw BackendError("cache entry " + path.string() + " holds key " + e.key);
      }
      return e.answer;
    }
    std::string answer = inner_->complete(request);
    write_atomic(key, to_json(CacheEntry{key, request, answer}).dump(2) + "\n");
    return answer;
  }

private:
  void write_atomic(const std::string & key, const std::string & content)
  {
    std::ostringstream tmp_name;
    tmp_name << key << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "."
             << counter_++;
    const auto tmp = dir_ / tmp_name.str();
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << content;
      if (!out) {
        throw BackendError("cannot write cache entry " + tmp.string());
      }
    }
    std::filesystem::rename(tmp, entry_path(key));
  }

  Completer * inner_;
  std::filesystem::path dir_;
  CacheMode mode_;
  std::atomic<std::uint64_t> counter_{0};
};

}  // namespace cotdrive::llm

#endif  // COTDRIVE__LLM__REPLAY_CACHE_HPP_
