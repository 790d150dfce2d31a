// Copyright 2026 The prlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_map>

namespace prlab::service {

struct RateLimit {
  std::uint64_t max_queries = 0;
  double window_seconds = 0.0;
};

// Fixed window per client id: the window opens with the client's first
// admitted query and admits at most max_queries until it closes.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;

  explicit RateLimiter(RateLimit limit);

  struct Verdict {
    bool allowed = false;
    std::chrono::nanoseconds retry_after{0};  // zero when allowed
  };

  Verdict acquire(const std::string& client_id) { return acquire(client_id, Clock::now()); }
  Verdict acquire(const std::string& client_id, Clock::time_point now);

  const RateLimit& limit() const { return limit_; }

 private:
  struct Window {
    Clock::time_point start;
    std::uint64_t used = 0;
  };

  RateLimit limit_;
  Clock::duration window_;
  std::mutex mu_;
  std::unordered_map<std::string, Window> windows_;
};

}  // namespace prlab::service
