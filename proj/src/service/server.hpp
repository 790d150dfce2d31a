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
#include <cstdint>
#include <memory>
#include <string>

#include "service/backend.hpp"
#include "service/rate_limiter.hpp"

namespace prlab::service {

struct ServerConfig {
  Mode mode = Mode::kHonest;
  std::string model_path;
  Backend::Kind backend_kind = Backend::Kind::kTree;
  RateLimit rate_limit;
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port

  // {"mode", "backend": {"type", "model"}, "rate_limit": {"max_queries",
  // "window_seconds"}, "listen": "host:port"}. A relative model path is taken
  // relative to the config file. PRLAB_LISTEN overrides "listen".
  static ServerConfig load(const std::string& path);
  static ServerConfig from_json(const nlohmann::json& j, const std::string& base_dir = "");
};

// Splits "host:port"; throws kInvalidArgument on anything else.
inline constexpr std::size_t kWorkerThreads = 32;

void parse_listen(const std::string& s, std::string& host, int& port);

class Server {
 public:
  Server(Backend backend, Mode mode, RateLimit limit);
  explicit Server(const ServerConfig& cfg);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and serves on a background thread; returns the bound port.
  int start(const std::string& host, int port);
  void wait();
  void stop();

  int port() const { return port_; }
  std::uint64_t queries_served() const { return next_id_.load(); }
  const Backend& backend() const { return backend_; }

 private:
  struct Impl;

  Backend backend_;
  Mode mode_;
  RateLimiter limiter_;
  std::atomic<std::uint64_t> next_id_{0};
  int port_ = 0;
  std::unique_ptr<Impl> impl_;
};

}  // namespace prlab::service
