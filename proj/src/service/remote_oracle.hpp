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

#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "audit/audit.hpp"
#include "core/feature_space.hpp"

namespace prlab::service {

struct RemoteOptions {
  std::string client_id = "auditor";
  std::chrono::milliseconds timeout{10000};
  // Give up after this many consecutive 429 replies for one query; 0 never
  // gives up.
  unsigned max_backoffs = 0;
};

// Audit oracle over HTTP. Backs off on 429 for the advertised delay and
// retries, so no query is dropped. A reply whose explanation does not argue
// for its decision is a protocol violation (kProtocol). Safe to call from
// several audit workers at once.
class RemoteOracle final : public audit::Oracle {
 public:
  // base_url like "http://127.0.0.1:8080"
  RemoteOracle(std::string base_url, std::shared_ptr<const core::FeatureSpace> space,
               RemoteOptions opts = {});

  audit::QueryResult query(const core::Instance& x) override;

  // Every answered query in completion order.
  std::vector<audit::QueryRecord> transcript() const;
  std::uint64_t backoffs() const { return backoffs_.load(); }

 private:
  std::string base_url_;
  std::shared_ptr<const core::FeatureSpace> space_;
  RemoteOptions opts_;
  std::atomic<std::uint64_t> backoffs_{0};
  mutable std::mutex mu_;
  std::vector<audit::QueryRecord> transcript_;
};

// GET /v1/health; true when the server answers {"status":"ok"}.
bool check_health(const std::string& base_url, std::chrono::milliseconds timeout);

// One JSON line per record: decision, explanation, features, query index.
std::string transcript_jsonl(const std::vector<audit::QueryRecord>& records,
                             const core::FeatureSpace& space);

}  // namespace prlab::service
