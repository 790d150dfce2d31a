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

#include "service/server.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "core/error.hpp"
#include "httplib.h"

namespace prlab::service {

void parse_listen(const std::string& s, std::string& host, int& port) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
    fail(ErrorCode::kInvalidArgument, "listen address must be host:port, got '" + s + "'");
  host = s.substr(0, colon);
  try {
    std::size_t used = 0;
    port = std::stoi(s.substr(colon + 1), &used);
    if (used != s.size() - colon - 1 || port < 0 || port > 65535) throw std::out_of_range("port");
  } catch (const std::exception&) {
    fail(ErrorCode::kInvalidArgument, "bad port in listen address '" + s + "'");
  }
}

ServerConfig ServerConfig::from_json(const nlohmann::json& j, const std::string& base_dir) {
  try {
    ServerConfig cfg;
    cfg.mode = parse_mode(j.at("mode").get<std::string>());
    const auto& b = j.at("backend");
    const std::string type = b.at("type").get<std::string>();
    if (type == "tree") {
      cfg.backend_kind = Backend::Kind::kTree;
    } else if (type == "mlp") {
      cfg.backend_kind = Backend::Kind::kMlp;
    } else {
      fail(ErrorCode::kInvalidArgument, "backend type must be tree or mlp");
    }
    std::filesystem::path model = b.at("model").get<std::string>();
    if (model.is_relative() && !base_dir.empty()) model = std::filesystem::path(base_dir) / model;
    cfg.model_path = model.string();
    const auto& rl = j.at("rate_limit");
    const auto max_q = rl.at("max_queries").get<long long>();
    const double window = rl.at("window_seconds").get<double>();
    if (max_q <= 0 || !(window > 0.0))
      fail(ErrorCode::kInvalidArgument, "rate limit and window must be positive");
    cfg.rate_limit = {static_cast<std::uint64_t>(max_q), window};
    std::string listen = j.value("listen", std::string("127.0.0.1:8080"));
    if (const char* env = std::getenv("PRLAB_LISTEN"); env && *env) listen = env;
    parse_listen(listen, cfg.host, cfg.port);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed server config: ") + e.what());
  }
}

ServerConfig ServerConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, path + ": " + e.what());
  }
  return from_json(j, std::filesystem::path(path).parent_path().string());
}

struct Server::Impl {
  httplib::Server http;
  std::thread thread;
};

namespace {

Backend load_backend(const ServerConfig& cfg) {
  Backend b = Backend::load(cfg.model_path);
  if (b.kind() != cfg.backend_kind)
    fail(ErrorCode::kInvalidArgument, "model file kind does not match backend type");
  return b;
}

void send_error(httplib::Response& res, int status, const std::string& msg) {
  res.status = status;
  res.set_content(to_line({{"error", msg}}), "application/json");
}

}  // namespace

Server::Server(Backend backend, Mode mode, RateLimit limit)
    : backend_(std::move(backend)), mode_(mode), limiter_(limit), impl_(std::make_unique<Impl>()) {}

Server::Server(const ServerConfig& cfg) : Server(load_backend(cfg), cfg.mode, cfg.rate_limit) {}

Server::~Server() { stop(); }

int Server::start(const std::string& host, int port) {
  auto& http = impl_->http;
  // httplib sizes its pool from the core count; on small machines a handful
  // of keep-alive clients would otherwise starve everyone else.
  http.new_task_queue = [] { return new httplib::ThreadPool(kWorkerThreads); };
  http.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(to_line({{"status", "ok"}}), "application/json");
  });
  http.Post("/v1/classify", [this](const httplib::Request& req, httplib::Response& res) {
    ClassifyRequest parsed;
    try {
      parsed = decode_request(req.body, backend_.space());
    } catch (const Error& e) {
      send_error(res, 400, e.what());
      return;
    }
    const auto verdict = limiter_.acquire(parsed.client_id);
    if (!verdict.allowed) {
      const auto ms = std::chrono::ceil<std::chrono::milliseconds>(verdict.retry_after).count();
      const auto secs = std::chrono::ceil<std::chrono::seconds>(verdict.retry_after).count();
      res.set_header("Retry-After", std::to_string(std::max<long long>(1, secs)));
      res.set_header("X-Retry-After-Ms", std::to_string(std::max<long long>(1, ms)));
      send_error(res, 429, "rate limit exceeded");
      return;
    }
    try {
      const auto reply = handle_classify(backend_, mode_, parsed.instance, next_id_++);
      res.set_content(encode_reply(reply, backend_.space()), "application/json");
    } catch (const Error& e) {
      send_error(res, e.code() == ErrorCode::kConformance ? 400 : 500, e.what());
    }
  });
  if (port == 0) {
    port_ = http.bind_to_any_port(host);
  } else {
    port_ = http.bind_to_port(host, port) ? port : -1;
  }
  if (port_ < 0) fail(ErrorCode::kNetwork, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
  http.wait_until_ready();
  return port_;
}

void Server::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void Server::stop() {
  if (!impl_) return;
  impl_->http.stop();
  wait();
}

}  // namespace prlab::service
