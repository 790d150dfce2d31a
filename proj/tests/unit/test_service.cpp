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

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <thread>

#include "audit/audit.hpp"
#include "core/error.hpp"
#include "httplib.h"
#include "service/backend.hpp"
#include "service/rate_limiter.hpp"
#include "service/remote_oracle.hpp"
#include "service/server.hpp"
#include "service/wire.hpp"
#include "support/random_models.hpp"

#ifndef PRLAB_FIXTURES
#define PRLAB_FIXTURES "tests/fixtures"
#endif

namespace prlab {
namespace {

using core::Label;
using service::Backend;
using service::Mode;

std::string url(int port) { return "http://127.0.0.1:" + std::to_string(port); }

class BouncerService : public ::testing::Test {
 protected:
  std::shared_ptr<const core::FeatureSpace> s = testing::bouncer_space();
  Backend backend = Backend::from_tree(testing::bouncer_tree(s));
  core::Instance x(const char* d, const char* socks, int age) const {
    return testing::bouncer_instance(*s, d, socks, age);
  }
};

TEST_F(BouncerService, AttackModeHidesAge) {
  const auto r = service::handle_classify(backend, Mode::kPrAttack, x("yes", "pink", 49), 0);
  EXPECT_EQ(r.decision, Label::kPositive);
  ASSERT_EQ(r.explanation.predicates.size(), 1u);
  EXPECT_EQ(s->feature(r.explanation.predicates[0].predicate.feature).name, "Disguised");
  EXPECT_FALSE(explain::mentions_discriminative(r.explanation, *s));
  EXPECT_EQ(r.explanation.provenance, explain::Provenance::kSurrogate);
}

TEST_F(BouncerService, HonestModeShowsAge) {
  const auto r = service::handle_classify(backend, Mode::kHonest, x("yes", "pink", 49), 0);
  EXPECT_EQ(r.decision, Label::kPositive);
  EXPECT_TRUE(explain::mentions_discriminative(r.explanation, *s));
  EXPECT_EQ(r.explanation.describe(*s), "[Disguised in {yes}, Age <= 59.5] => 1");
}

TEST_F(BouncerService, DecisionsAgreeAcrossModesAndRepliesAreApropos) {
  for (const auto& xi : testing::all_instances(*s)) {
    const auto h = service::handle_classify(backend, Mode::kHonest, xi, 0);
    const auto a = service::handle_classify(backend, Mode::kPrAttack, xi, 0);
    ASSERT_EQ(h.decision, a.decision);
    for (const auto* r : {&h, &a}) {
      ASSERT_TRUE(explain::is_apropos(r->explanation, xi, *s));
      ASSERT_TRUE(explain::is_consequent(r->explanation, r->decision));
    }
    ASSERT_FALSE(explain::mentions_discriminative(a.explanation, *s));
  }
}

TEST_F(BouncerService, ReplyWireFormIsOneSortedLine) {
  const auto r = service::handle_classify(backend, Mode::kPrAttack, x("yes", "pink", 49), 7);
  const std::string line = service::encode_reply(r, *s);
  EXPECT_EQ(line,
            "{\"decision\":1,\"explanation\":{\"label\":1,\"predicates\":[{\"branch\":true,"
            "\"feature\":\"Disguised\",\"op\":\"in\",\"value\":[\"yes\"]}]},\"query_id\":7}\n");
  EXPECT_EQ(line.find("provenance"), std::string::npos);
  EXPECT_EQ(line.find("surrogate"), std::string::npos);
  const auto back = service::decode_reply(line, *s);
  EXPECT_EQ(back.decision, r.decision);
  EXPECT_EQ(back.query_id, 7u);
  EXPECT_EQ(back.explanation.predicates, r.explanation.predicates);
}

TEST_F(BouncerService, RequestWireForm) {
  const std::string body = service::encode_request("alice", x("no", "pink", 33), *s);
  EXPECT_EQ(body, "{\"client_id\":\"alice\",\"features\":{\"Age\":33,\"Disguised\":\"no\",\"Socks\":\"pink\"}}\n");
  const auto req = service::decode_request(body, *s);
  EXPECT_EQ(req.client_id, "alice");
  EXPECT_EQ(req.instance, x("no", "pink", 33));
}

TEST_F(BouncerService, MalformedRequests) {
  auto code = [&](const std::string& body) -> std::optional<ErrorCode> {
    try {
      service::decode_request(body, *s);
    } catch (const Error& e) {
      return e.code();
    }
    return std::nullopt;
  };
  EXPECT_EQ(code("not json"), ErrorCode::kParse);
  EXPECT_EQ(code(R"({"features": {}})"), ErrorCode::kParse);
  EXPECT_EQ(code(R"({"client_id": "a", "features": {"Age": 30, "Disguised": "no"}})"), ErrorCode::kConformance);
  EXPECT_EQ(code(R"({"client_id": "a", "features": {"Age": 130, "Disguised": "no", "Socks": "pink"}})"), ErrorCode::kConformance);
  EXPECT_EQ(code(R"({"client_id": "a", "features": {"Age": 30, "Disguised": "maybe", "Socks": "pink"}})"), ErrorCode::kConformance);
  EXPECT_EQ(code(R"({"client_id": "a", "features": {"Age": "30", "Disguised": "no", "Socks": "pink"}})"), ErrorCode::kConformance);
  EXPECT_EQ(code(R"({"client_id": "a", "features": {"Age": 30, "Disguised": "no", "Shoes": "pink"}})"), ErrorCode::kConformance);
}

TEST_F(BouncerService, ModelFileRoundTrip) {
  const auto loaded = Backend::load(std::string(PRLAB_FIXTURES) + "/bouncer_model.json");
  ASSERT_EQ(loaded.kind(), Backend::Kind::kTree);
  EXPECT_EQ(*loaded.tree(), *backend.tree());
  EXPECT_EQ(Backend::from_json(backend.to_json()).to_json(), backend.to_json());
  EXPECT_THROW(Backend::load("/nonexistent.json"), Error);
}

TEST(MlpBackend, DiracRenderingOnLegitFeatures) {
  auto s = testing::bouncer_space();
  credit::Standardizer sc{{0, 0, 0}, {1, 1, 1}};
  credit::MlpParams p(3, 2);
  p.theta()[p.w2_index(0)] = 1.0;
  p.theta()[p.w1_index(0, 2)] = -0.1;  // older visitors are bounced
  p.theta()[p.b1_index(0)] = 5.0;
  p.theta()[p.b2_index()] = -1.0;
  const auto b = Backend::from_mlp(s, credit::MlpModel(sc, p));
  for (const auto& xi : testing::all_instances(*s)) {
    const auto h = service::handle_classify(b, Mode::kHonest, xi, 0);
    const auto a = service::handle_classify(b, Mode::kPrAttack, xi, 0);
    ASSERT_EQ(h.decision, a.decision);
    ASSERT_EQ(a.explanation.predicates.size(), 2u);
    ASSERT_EQ(h.explanation.predicates.size(), 3u);
    ASSERT_TRUE(explain::is_apropos(a.explanation, xi, *s));
    ASSERT_TRUE(explain::is_consequent(a.explanation, a.decision));
    ASSERT_FALSE(explain::mentions_discriminative(a.explanation, *s));
    ASSERT_TRUE(explain::mentions_discriminative(h.explanation, *s));
  }
}

TEST(RateLimiter, FixedWindowPerClient) {
  service::RateLimiter lim({3, 1.0});
  const auto t0 = service::RateLimiter::Clock::now();
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(lim.acquire("a", t0).allowed);
  const auto refused = lim.acquire("a", t0 + std::chrono::milliseconds(400));
  EXPECT_FALSE(refused.allowed);
  EXPECT_EQ(std::chrono::duration_cast<std::chrono::milliseconds>(refused.retry_after).count(), 600);
  EXPECT_TRUE(lim.acquire("b", t0).allowed);
  EXPECT_TRUE(lim.acquire("a", t0 + std::chrono::milliseconds(1000)).allowed);
}

TEST(RateLimiter, RejectsNonPositiveLimits) {
  EXPECT_THROW(service::RateLimiter({0, 1.0}), Error);
  EXPECT_THROW(service::RateLimiter({1, 0.0}), Error);
}

TEST(RateLimiter, NeverExceedsBudgetUnderContention) {
  service::RateLimiter lim({25, 3600.0});
  std::atomic<int> admitted{0};
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < 16; ++t)
      threads.emplace_back([&] {
        for (int i = 0; i < 100; ++i) admitted += lim.acquire("shared").allowed;
      });
  }
  EXPECT_EQ(admitted.load(), 25);
}

TEST(ServerConfig, ParsesAndResolvesModelPath) {
  const auto cfg = service::ServerConfig::load(std::string(PRLAB_FIXTURES) + "/server_attack.json");
  EXPECT_EQ(cfg.mode, Mode::kPrAttack);
  EXPECT_EQ(cfg.rate_limit.max_queries, 100000u);
  EXPECT_NE(cfg.model_path.find("fixtures"), std::string::npos);
  EXPECT_THROW(service::ServerConfig::from_json(nlohmann::json::parse(
                   R"({"mode": "sneaky", "backend": {"type": "tree", "model": "m"}, "rate_limit": {"max_queries": 1, "window_seconds": 1}})")),
               Error);
  EXPECT_THROW(service::ServerConfig::from_json(nlohmann::json::parse(
                   R"({"mode": "honest", "backend": {"type": "tree", "model": "m"}, "rate_limit": {"max_queries": 0, "window_seconds": 1}})")),
               Error);
  std::string host;
  int port = 0;
  service::parse_listen("0.0.0.0:9090", host, port);
  EXPECT_EQ(host, "0.0.0.0");
  EXPECT_EQ(port, 9090);
  EXPECT_THROW(service::parse_listen("9090", host, port), Error);
}

class LiveServer : public BouncerService {
 protected:
  std::unique_ptr<service::Server> start(Mode mode, service::RateLimit limit, Backend b) {
    auto srv = std::make_unique<service::Server>(std::move(b), mode, limit);
    port = srv->start("127.0.0.1", 0);
    return srv;
  }
  int port = 0;
};

TEST_F(LiveServer, HealthDoesNotDiscloseMode) {
  auto srv = start(Mode::kPrAttack, {100, 60}, backend);
  EXPECT_TRUE(service::check_health(url(port), std::chrono::seconds(5)));
  httplib::Client cli(url(port));
  auto res = cli.Get("/v1/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->body, "{\"status\":\"ok\"}\n");
}

TEST_F(LiveServer, MalformedBodyIs400AndLimitIs429) {
  auto srv = start(Mode::kHonest, {2, 60}, backend);
  httplib::Client cli(url(port));
  auto bad = cli.Post("/v1/classify", "{\"client_id\": 3}", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  const std::string body = service::encode_request("c", x("no", "pink", 30), *s);
  for (int i = 0; i < 2; ++i) {
    auto ok = cli.Post("/v1/classify", body, "application/json");
    ASSERT_TRUE(ok);
    EXPECT_EQ(ok->status, 200);
    EXPECT_EQ(service::decode_reply(ok->body, *s).query_id, static_cast<std::uint64_t>(i));
  }
  auto limited = cli.Post("/v1/classify", body, "application/json");
  ASSERT_TRUE(limited);
  EXPECT_EQ(limited->status, 429);
  EXPECT_TRUE(limited->has_header("Retry-After"));
  EXPECT_GE(std::stoll(limited->get_header_value("Retry-After")), 1);
  EXPECT_TRUE(limited->has_header("X-Retry-After-Ms"));
}

TEST_F(LiveServer, RemoteScenarioBMatchesInProcess) {
  auto srv = start(Mode::kPrAttack, {100000, 60}, backend);
  service::RemoteOracle remote(url(port), s);
  audit::ClassifierOracle local(*backend.tree());
  std::vector<core::Instance> profiles;
  for (int age : {20, 50, 59, 60, 70})
    for (const char* d : {"yes", "no"}) profiles.push_back(x(d, age % 20 ? "pink" : "none", age));
  const std::vector<std::size_t> age{2};
  const auto a = audit::scenario_b_swap(profiles, remote, *s, age, {4});
  const auto b = audit::scenario_b_swap(profiles, local, *s, age);
  EXPECT_EQ(a.ip_rate, b.ip_rate);
  EXPECT_EQ(a.ips_found.size(), b.ips_found.size());
  EXPECT_GT(a.ips_found.size(), 0u);
  const auto transcript = remote.transcript();
  EXPECT_EQ(transcript.size(), a.queries_issued);
  for (const auto& r : transcript) {
    ASSERT_TRUE(r.explanation.has_value());
    EXPECT_TRUE(explain::is_apropos(*r.explanation, r.instance, *s));
    EXPECT_FALSE(explain::mentions_discriminative(*r.explanation, *s));
  }
}

TEST_F(LiveServer, BacksOffWithoutDroppingQueries) {
  // 10 queries per 0.2 s; 60 queries need at least 5 refusals-and-waits.
  auto srv = start(Mode::kPrAttack, {10, 0.2}, backend);
  service::RemoteOracle remote(url(port), s);
  const auto q = x("yes", "pink", 49);
  for (int i = 0; i < 60; ++i) EXPECT_EQ(remote.query(q).decision, Label::kPositive);
  EXPECT_EQ(remote.transcript().size(), 60u);
  EXPECT_GT(remote.backoffs(), 0u);
  EXPECT_EQ(srv->queries_served(), 60u);
}

TEST_F(LiveServer, HonestLegitServerYieldsNoIncoherentPairs) {
  const auto legit = tree::pr_attack_prune(*backend.tree(), x("yes", "pink", 49));
  auto srv = start(Mode::kHonest, {100000, 60}, Backend::from_tree(legit));
  service::RemoteOracle remote(url(port), s);
  EXPECT_FALSE(audit::find_ip_exhaustive(remote, *s).has_value());
  const std::vector<core::Instance> seeds{x("yes", "pink", 49), x("no", "none", 70)};
  EXPECT_EQ(audit::scenario_a_probe(seeds, remote, *s, 50, 1).ip_rate, 0.0);
}

TEST_F(LiveServer, NetworkFailureIsReported) {
  int dead_port = 0;
  {
    auto srv = start(Mode::kHonest, {10, 1}, backend);
    dead_port = port;
  }
  service::RemoteOptions opts;
  opts.timeout = std::chrono::milliseconds(500);
  service::RemoteOracle remote(url(dead_port), s, opts);
  try {
    remote.query(x("yes", "pink", 49));
    FAIL() << "expected a network error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNetwork);
  }
}

TEST_F(BouncerService, NonConsequentReplyIsProtocolViolation) {
  httplib::Server liar;
  liar.Post("/v1/classify", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"decision\":0,\"explanation\":{\"label\":1,\"predicates\":[]},\"query_id\":0}\n",
                    "application/json");
  });
  const int p = liar.bind_to_any_port("127.0.0.1");
  std::thread th([&] { liar.listen_after_bind(); });
  liar.wait_until_ready();
  service::RemoteOracle remote(url(p), s);
  try {
    remote.query(x("yes", "pink", 49));
    ADD_FAILURE() << "expected a protocol error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProtocol);
  }
  liar.stop();
  th.join();
}

TEST_F(LiveServer, ConcurrentClientsStayWithinBudget) {
  auto srv = start(Mode::kPrAttack, {5, 3600}, backend);
  std::atomic<int> ok{0}, limited{0};
  const std::string body = service::encode_request("same-client", x("no", "pink", 30), *s);
  {
    std::vector<std::jthread> clients;
    for (int c = 0; c < 16; ++c)
      clients.emplace_back([&] {
        httplib::Client cli(url(port));
        for (int i = 0; i < 4; ++i) {
          auto res = cli.Post("/v1/classify", body, "application/json");
          if (res && res->status == 200) ++ok;
          if (res && res->status == 429) ++limited;
          if (!res) std::fprintf(stderr, "client error %s\n", httplib::to_string(res.error()).c_str());
        }
      });
  }
  EXPECT_EQ(ok.load(), 5);
  EXPECT_EQ(limited.load(), 59);
}

TEST_F(LiveServer, ServerFromConfigHonoursListenOverride) {
  ::setenv("PRLAB_LISTEN", "127.0.0.1:0", 1);
  const auto cfg = service::ServerConfig::load(std::string(PRLAB_FIXTURES) + "/server_attack.json");
  ::unsetenv("PRLAB_LISTEN");
  EXPECT_EQ(cfg.port, 0);
  service::Server srv(cfg);
  const int p = srv.start(cfg.host, cfg.port);
  EXPECT_GT(p, 0);
  service::RemoteOracle remote(url(p), srv.backend().space_ptr());
  const auto r = remote.query(x("yes", "pink", 62));
  EXPECT_EQ(r.decision, Label::kNegative);
  EXPECT_FALSE(explain::mentions_discriminative(*r.explanation, *s));
}

}  // namespace
}  // namespace prlab
