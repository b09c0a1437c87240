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

#ifndef COTDRIVE__EVAL__EVALUATE_HPP_
#define COTDRIVE__EVAL__EVALUATE_HPP_

#include "cotdrive/eval/episode.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace cotdrive
{

/// Builds a fresh agent for one episode. May be called from several threads.
using AgentFactory = std::function<std::unique_ptr<Agent>()>;

/// Runs `episodes` episodes with seeds base_seed, base_seed + 1, ... on up to
/// `jobs` threads. Results come back in seed order whatever the completion order.
inline std::vector<EpisodeResult> evaluate(
  const ScenarioConfig & base, const AgentFactory & make_agent, int episodes, std::uint64_t base_seed,
  int jobs = 1)
{
  if (episodes < 1) {
    throw std::invalid_argument("evaluate: episodes must be >= 1");
  }
  if (jobs < 1) {
    throw std::invalid_argument("evaluate: jobs must be >= 1");
  }
  base.validate();
  std::vector<EpisodeResult> results(static_cast<std::size_t>(episodes));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (int i = next++; i < episodes; i = next++) {
      try {
        ScenarioConfig config = base;
        config.seed = base_seed + static_cast<std::uint64_t>(i);
        auto agent = make_agent();
        results[static_cast<std::size_t>(i)] = run_episode(config, *agent);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        next = episodes;
      }
    }
  };

  const int n_threads = std::min(jobs, episodes);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back(worker);
    }
    for (auto & t : pool) {
      t.join();
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return results;
}

}  // namespace cotdrive

#endif  // COTDRIVE__EVAL__EVALUATE_HPP_
