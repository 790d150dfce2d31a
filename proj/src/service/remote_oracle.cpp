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

#include "service/remote_oracle.hpp"

#include <thread>

#include "core/error.hpp"
#include "httplib.h"
#include "service/wire.hpp"

namespace prlab::service {

namespace {

httplib::Client make_client(const std::string& base_url, std::chrono::milliseconds timeout) {
  httplib::Client cli(base_url);
  if (!cli.is_valid()) fail(ErrorCode::kInvalidArgument, "bad server url '" + base_url + "'");
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);
  return cli;
}

std::chrono::milliseconds retry_delay(const httplib::Response& res) {
  if (res.has_header("X-Retry-After-Ms")) {
    try {
      return std::chrono::milliseconds(std::stoll(res.get_header_value("X-Retry-After-Ms")));
    } catch (const std::exception&) {
    }
  }
  if (res.has_header("Retry-After")) {
    try {
      return std::chrono::seconds(std::stoll(res.get_header_value("Retry-After")));
    } catch (const std::exception&) {
    }
  }
  return std::chrono::seconds(1);
}

}  // namespace

RemoteOracle::RemoteOracle(std::string base_url, std::shared_ptr<const core::FeatureSpace> space,
                           RemoteOptions opts)
    : base_url_(std::move(base_url)), space_(std::move(space)), opts_(std::move(opts)) {
  if (!space_) fail(ErrorCode::kInvalidArgument, "remote oracle needs a feature space");
  make_client(base_url_, opts_.timeout);
}

audit::QueryResult RemoteOracle::query(const core::Instance& x) {
  const std::string body = encode_request(opts_.client_id, x, *space_);
  auto cli = make_client(base_url_, opts_.timeout);
  unsigned refused = 0;
  for (;;) {
    auto res = cli.Post("/v1/classify", body, "application/json");
    if (!res)
      fail(ErrorCode::kNetwork, base_url_ + ": " + httplib::to_string(res.error()));
    if (res->status == 429) {
      ++backoffs_;
      if (opts_.max_backoffs && ++refused >= opts_.max_backoffs)
        fail(ErrorCode::kRateLimited, "rate limited " + std::to_string(refused) + " times in a row");
      std::this_thread::sleep_for(retry_delay(*res));
      continue;
    }
    if (res->status != 200)
      fail(ErrorCode::kProtocol, "server answered " + std::to_string(res->status) + ": " + res->body);
    ClassifyReply reply = decode_reply(res->body, *space_);
    if (!explain::is_consequent(reply.explanation, reply.decision))
      fail(ErrorCode::kProtocol, "reply " + std::to_string(reply.query_id) +
                                     " carries an explanation for the other decision");
    audit::QueryRecord rec{x, reply.decision, reply.explanation, reply.query_id};
    {
      std::lock_guard lock(mu_);
      transcript_.push_back(rec);
    }
    return {reply.decision, std::move(reply.explanation)};
  }
}

std::vector<audit::QueryRecord> RemoteOracle::transcript() const {
  std::lock_guard lock(mu_);
  return transcript_;
}

bool check_health(const std::string& base_url, std::chrono::milliseconds timeout) {
  auto cli = make_client(base_url, timeout);
  auto res = cli.Get("/v1/health");
  if (!res || res->status != 200) return false;
  try {
    return nlohmann::json::parse(res->body).value("status", "") == "ok";
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

std::string transcript_jsonl(const std::vector<audit::QueryRecord>& records,
                             const core::FeatureSpace& space) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::json features = nlohmann::json::object();
    nlohmann::json::parse(encode_request("", r.instance, space)).at("features").swap(features);
    nlohmann::json j{{"decision", core::to_int(r.decision)},
                     {"features", features},
                     {"query_id", r.timestamp}};
    if (r.explanation) j["explanation"] = explanation_to_json(*r.explanation, space);
    out += to_line(j);
  }
  return out;
}

}  // namespace prlab::service
