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

#include "service/rate_limiter.hpp"

#include <cmath>

#include "core/error.hpp"

namespace prlab::service {

RateLimiter::RateLimiter(RateLimit limit) : limit_(limit) {
  if (limit.max_queries == 0) fail(ErrorCode::kInvalidArgument, "rate limit must be positive");
  if (!(limit.window_seconds > 0.0) || !std::isfinite(limit.window_seconds))
    fail(ErrorCode::kInvalidArgument, "rate-limit window must be positive");
  window_ = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(limit.window_seconds));
  if (window_.count() <= 0) window_ = Clock::duration(1);
}

RateLimiter::Verdict RateLimiter::acquire(const std::string& client_id, Clock::time_point now) {
  std::lock_guard lock(mu_);
  auto [it, fresh] = windows_.try_emplace(client_id, Window{now, 0});
  Window& w = it->second;
  if (!fresh && now - w.start >= window_) w = Window{now, 0};
  if (w.used < limit_.max_queries) {
    ++w.used;
    return {true, {}};
  }
  auto wait = w.start + window_ - now;
  if (wait <= Clock::duration::zero()) wait = Clock::duration(1);
  return {false, std::chrono::duration_cast<std::chrono::nanoseconds>(wait)};
}

}  // namespace prlab::service
