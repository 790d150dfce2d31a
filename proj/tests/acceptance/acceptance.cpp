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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// The German Credit criteria share a single 30-model experiment.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "audit/audit.hpp"
#include "core/classifier.hpp"
#include "credit/experiment.hpp"
#include "credit/german.hpp"
#include "credit/mlp.hpp"
#include "dimpact/dimpact.hpp"
#include "httplib.h"
#include "service/backend.hpp"
#include "service/remote_oracle.hpp"
#include "service/server.hpp"
#include "service/wire.hpp"
#include "support/dimpact_oracle.hpp"
#include "support/random_models.hpp"

#ifndef PRLAB_DATA
#define PRLAB_DATA "data"
#endif

namespace prlab {
namespace {

using core::Instance;
using core::Label;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Serves handle_classify in-process, numbering queries like the server does.
class InProcessService final : public audit::Oracle {
 public:
  InProcessService(const service::Backend& b, service::Mode m) : backend_(b), mode_(m) {}
  audit::QueryResult query(const Instance& x) override {
    auto r = service::handle_classify(backend_, mode_, x, next_++);
    return {r.decision, std::move(r.explanation)};
  }

 private:
  const service::Backend& backend_;
  service::Mode mode_;
  std::atomic<std::uint64_t> next_{0};
};

std::string report_csv(const audit::AuditReport& r) {
  const audit::AuditReport one[] = {r};
  const audit::RateSummary rows[] = {audit::summarize(one)};
  std::ostringstream out;
  audit::write_report_csv(out, rows);
  return out.str();
}

Outcome attack_correctness() {
  const auto t0 = Clock::now();
  testing::Rng rng(20240611);
  std::uint64_t pairs = 0, failures = 0, law_checks = 0;
  for (; pairs < 10000; ++pairs) {
    const auto s = testing::random_space(rng);
    const auto t = testing::random_tree(rng, s, 5);
    const auto x = testing::random_instance(rng, *s);
    const auto c = tree::pr_attack_prune(t, x);
    bool ok = c.predict(x) == t.predict(x) && !c.uses_discriminative() && core::is_legitimate(c, *s);
    for (auto y : testing::all_instances(*s)) {
      for (std::size_t d : s->discriminative_indices()) y[d] = x[d];
      ok = ok && c.predict(y) == t.predict(y);
      ++law_checks;
    }
    failures += !ok;
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < 60.0,
          fmt("%llu random tree/instance pairs, %llu failures, %llu partial-evaluation checks, %.1fs",
              (unsigned long long)pairs, (unsigned long long)failures,
              (unsigned long long)law_checks, secs)};
}

Outcome bouncer_exhibit() {
  testing::Rng rng(77);
  std::shared_ptr<const core::FeatureSpace> s;
  std::optional<tree::DecisionTree> t;
  while (!t) {
    s = testing::random_space(rng);
    auto cand = testing::random_tree(rng, s, 6);
    if (!core::is_legitimate(cand, *s)) t = std::move(cand);
  }
  service::Server srv(service::Backend::from_tree(*t), service::Mode::kPrAttack, {1000000, 60});
  const int port = srv.start("127.0.0.1", 0);
  service::RemoteOracle remote("http://127.0.0.1:" + std::to_string(port), s);
  std::uint64_t bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = testing::random_instance(rng, *s);
    const auto r = remote.query(x);
    bad += r.decision != t->predict(x);
  }
  const auto transcript = remote.transcript();
  for (const auto& rec : transcript) {
    const auto& a = *rec.explanation;
    const bool ok = explain::is_apropos(a, rec.instance, *s) && explain::is_consequent(a, rec.decision) &&
                    !explain::mentions_discriminative(a, *s);
    bad += !ok;
  }
  srv.stop();
  return {bad == 0 && transcript.size() == 1000,
          fmt("%zu attack-mode replies over HTTP from a discriminative tree, %llu violations",
              transcript.size(), (unsigned long long)bad)};
}

core::FeatureSpace binary_space(int legit) {
  nlohmann::json fs = nlohmann::json::array();
  auto bit = nlohmann::json{{"type", "integer"}, {"lo", 0}, {"hi", 1}};
  for (int i = 0; i < legit; ++i)
    fs.push_back({{"name", "l" + std::to_string(i)}, {"domain", bit}, {"tag", "legit"}});
  fs.push_back({{"name", "d"}, {"domain", bit}, {"tag", "discriminative"}});
  return core::FeatureSpace::from_json({{"features", fs}});
}

Outcome incoherent_pair_equivalence() {
  std::size_t classifiers = 0, mismatches = 0, count_checks = 0;
  for (int legit : {1, 2}) {
    const auto s = binary_space(legit);
    for (const auto& c : core::enumerate_all_classifiers(s)) {
      ++classifiers;
      audit::ClassifierOracle oracle(c);
      const auto ip = audit::find_ip_exhaustive(oracle, s);
      const bool discriminative = !core::is_legitimate(c, s);
      mismatches += ip.has_value() != discriminative;
      if (ip) mismatches += !audit::is_incoherent(ip->first, ip->second, s);
    }
    const auto legit_cs = core::enumerate_legit_classifiers(s);
    for (const auto& x : testing::all_instances(s))
      for (Label y : {Label::kNegative, Label::kPositive}) {
        const auto n = core::count_pr_functions(s, x, y);
        std::uint64_t direct = 0;
        for (const auto& c : legit_cs) direct += c.classify(x) == y;
        mismatches += 2 * n.pr_count != n.total_count || direct != n.pr_count ||
                      n.total_count != legit_cs.size();
        ++count_checks;
      }
  }
  return {classifiers == 16 + 256 && mismatches == 0,
          fmt("%zu classifiers, %zu (x, y) counts, %zu mismatches", classifiers, count_checks, mismatches)};
}

Outcome bouncer_surrogates() {
  const auto s = testing::bouncer_space();
  const auto t = testing::bouncer_tree(s);
  const auto enter = tree::DecisionTree::leaf(s, Label::kPositive);
  const auto bounce = tree::DecisionTree::leaf(s, Label::kNegative);
  const auto& n = t.nodes();
  const auto disguised = *n[0].predicate;
  const auto socks = tree::DecisionTree::split(*n[n[0].if_false].predicate, enter, bounce);
  const auto x49 = testing::bouncer_instance(*s, "yes", "pink", 49);
  const auto x62 = testing::bouncer_instance(*s, "yes", "pink", 62);
  const bool upper = tree::pr_attack_prune(t, x49) == tree::DecisionTree::split(disguised, enter, socks);
  const bool lower = tree::pr_attack_prune(t, x62) == tree::DecisionTree::split(disguised, bounce, socks);
  audit::ClassifierOracle oracle(t);
  const std::vector<audit::QueryRecord> log{{x49, oracle.query(x49).decision, {}, 0},
                                            {x62, oracle.query(x62).decision, {}, 1}};
  const bool ip = audit::is_incoherent(log[0], log[1], *s) && audit::check_coherence_log(log, *s).size() == 1;
  return {upper && lower && ip, fmt("Age=49 surrogate %s, Age=62 surrogate %s, (49, 62) incoherent: %s",
                                    upper ? "matches" : "differs", lower ? "matches" : "differs",
                                    ip ? "yes" : "no")};
}

struct CreditRun {
  credit::ExperimentResult result;
  double seconds = 0.0;
};

CreditRun run_credit() {
  const std::string data = std::string(PRLAB_DATA) + "/german.data-numeric";
  const auto cfg = credit::load_config(std::string(PRLAB_DATA) + "/german_credit.json");
  const auto space = credit::german_feature_space(cfg);
  credit::ExperimentSpec spec;
  spec.models = 30;
  spec.train.epochs = 100;
  spec.workers = std::max(1u, std::thread::hardware_concurrency());
  spec.swap_sets = credit::default_swap_sets(space, cfg);
  const auto t0 = Clock::now();
  CreditRun run{credit::run_credit_experiment(credit::load_german_numeric_file(data), space, spec), 0.0};
  run.seconds = seconds_since(t0);
  return run;
}

Outcome credit_accuracy(const CreditRun& run) {
  const auto& r = run.result;
  const bool ok = r.runs.size() == 30 && r.epochs == 100 && r.mean_accuracy >= 0.74 &&
                  r.mean_accuracy <= 0.80 && run.seconds < 600.0;
  return {ok, fmt("mean validation accuracy %.2f%% sd %.2f%% over %zu seeds at %d epochs, %.1fs "
                  "(published 76.97%% sd 0.92%%)",
                  100 * r.mean_accuracy, 100 * r.stddev_accuracy, r.runs.size(), r.epochs, run.seconds)};
}

Outcome scenario_b_rates(const CreditRun& run) {
  const auto& b = run.result.scenario_b;
  if (b.size() != 5) return {false, "expected four single-feature swap sets and one joint set"};
  const double all = b[4].rate;
  bool ordered = true, within = true;
  std::string side;
  for (std::size_t i = 0; i < 4; ++i) {
    ordered = ordered && b[i].rate < all;
    const double gap = std::abs(b[i].rate - credit::ReferenceFigures::kSwapRates[i]);
    within = within && gap <= 0.02;
    side += fmt("%s%s %.2f%% vs %.2f%%", i ? ", " : "", b[i].features.c_str(), 100 * b[i].rate,
                100 * credit::ReferenceFigures::kSwapRates[i]);
  }
  const bool band = all >= 0.02 && all <= 0.07;
  return {band && ordered && within,
          fmt("all four %.2f%% sd %.2f%% (band 2-7%%: %s), singles below all four: %s, "
              "per feature within 2pp: %s [%s]",
              100 * all, 100 * b[4].stddev, band ? "in" : "out", ordered ? "yes" : "no",
              within ? "yes" : "no", side.c_str())};
}

Outcome scenario_a_rate(const CreditRun& run) {
  const auto& a = run.result.scenario_a;
  return {a.rate >= 0.03 && a.rate <= 0.14,
          fmt("IP rate %.2f%% sd %.2f%% over %zu models (published 8.09%% sd 4.08%%)", 100 * a.rate,
              100 * a.stddev, run.result.runs.size())};
}

Outcome confidence_math(const CreditRun& run) {
  const double c107 = audit::confidence(0.0425, 107);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> up(1e-3, 0.999), uc(0.01, 0.9999);
  std::uint64_t broken = 0;
  for (int i = 0; i < 10000; ++i) {
    const double p = up(rng), c = uc(rng);
    const auto n = audit::queries_needed(p, c);
    broken += audit::confidence(p, n) < c || (n > 1 && audit::confidence(p, n - 1) >= c);
  }
  std::ostringstream report;
  credit::write_replication_report(report, run.result, 0.99);
  const std::string text = report.str();
  bool printed = text.find("note: pair counts") != std::string::npos;
  for (std::size_t i = 0; i < 5; ++i) {
    const auto pub = credit::ReferenceFigures::kPairsFor99[i];
    const auto ours = audit::queries_needed(credit::ReferenceFigures::kSwapRates[i], 0.99);
    printed = printed && text.find(fmt("published pairs %llu, closed form on published rate %llu",
                                       (unsigned long long)pub, (unsigned long long)ours)) != std::string::npos;
  }
  std::printf("%s", text.c_str());
  return {c107 >= 0.99 && broken == 0 && printed,
          fmt("confidence(0.0425, 107) = %.5f, %llu round-trip failures in 10000, report lists both counts: %s",
              c107, (unsigned long long)broken, printed ? "yes" : "no")};
}

Outcome disparate_impact() {
  double worst = 0.0;
  std::uint64_t seed = 1;
  for (int i = 1; i <= 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (auto sc : {dimpact::Scenario::kIndependence, dimpact::Scenario::kDependence}) {
        const dimpact::DisparityParams p{i / 10.0, (j + 0.5) / 10.0, sc};
        worst = std::max(worst, std::abs(dimpact::ip_probability(p) - testing::monte_carlo_ip(p, 1000000, seed++)));
      }
  bool zero = true;
  for (double pb : dimpact::unit_grid(101))
    zero = zero && dimpact::ip_probability({1.0, pb, dimpact::Scenario::kDependence}) == 0.0;
  return {worst < 3e-3 && zero,
          fmt("max |closed form - Monte Carlo| = %.2e over 10x10 grid and both scenarios, "
              "dependence at alpha=1 exactly zero: %s",
              worst, zero ? "yes" : "no")};
}

Outcome gradient_check() {
  const auto data = credit::to_dataset(credit::load_german_numeric_file(std::string(PRLAB_DATA) + "/german.data-numeric"));
  credit::TrainSpec spec;
  spec.seed = 3;
  const std::size_t n_train = credit::training_rows(data.size(), spec.validation_split);
  core::Dataset train;
  train.instances.assign(data.instances.begin(), data.instances.begin() + n_train);
  train.labels.assign(data.labels.begin(), data.labels.begin() + n_train);
  auto model = credit::initial_model(data, spec);
  const double at_init = credit::gradient_check(model, train);
  credit::continue_training(model, train, spec, 10);
  const double after = credit::gradient_check(model, train);
  return {at_init < 1e-4 && after < 1e-4,
          fmt("max relative error %.2e at initialisation, %.2e after 10 epochs (%zu parameters, %zu rows)",
              at_init, after, model.params().size(), n_train)};
}

Outcome wire_fidelity() {
  const auto s = testing::bouncer_space();
  const auto backend = service::Backend::from_tree(testing::bouncer_tree(s));
  service::Server srv(backend, service::Mode::kPrAttack, {1000000, 60});
  const std::string url = "http://127.0.0.1:" + std::to_string(srv.start("127.0.0.1", 0));

  std::vector<Instance> profiles;
  for (int age = 18; age <= 100; age += 3)
    for (const char* d : {"yes", "no"})
      for (const char* socks : {"pink", "none"}) profiles.push_back(testing::bouncer_instance(*s, d, socks, age));
  const std::vector<std::size_t> age{s->require_index("Age")};

  service::RemoteOracle remote(url, s);
  InProcessService local(backend, service::Mode::kPrAttack);
  const audit::AuditOptions par{4};
  const auto b_http = report_csv(audit::scenario_b_swap(profiles, remote, *s, age, par));
  const auto b_local = report_csv(audit::scenario_b_swap(profiles, local, *s, age));
  const auto a_http = report_csv(audit::scenario_a_probe(profiles, remote, *s, 2000, 11, par));
  const auto a_local = report_csv(audit::scenario_a_probe(profiles, local, *s, 2000, 11));
  srv.stop();
  const bool identical = b_http == b_local && a_http == a_local;

  // 16 clients share one identity, then each uses its own.
  service::Server limited(backend, service::Mode::kPrAttack, {40, 3600});
  const int port = limited.start("127.0.0.1", 0);
  std::atomic<int> shared_ok{0}, own_over{0};
  std::vector<std::atomic<int>> own_ok(16);
  {
    std::vector<std::jthread> clients;
    for (int c = 0; c < 16; ++c)
      clients.emplace_back([&, c] {
        httplib::Client cli("127.0.0.1", port);
        const auto x = testing::bouncer_instance(*s, "yes", "pink", 20 + c);
        const auto shared = service::encode_request("everyone", x, *s);
        const auto own = service::encode_request("client-" + std::to_string(c), x, *s);
        for (int i = 0; i < 10; ++i) {
          auto res = cli.Post("/v1/classify", shared, "application/json");
          if (res && res->status == 200) ++shared_ok;
        }
        for (int i = 0; i < 50; ++i) {
          auto res = cli.Post("/v1/classify", own, "application/json");
          if (res && res->status == 200) ++own_ok[c];
        }
      });
  }
  for (auto& n : own_ok) own_over += n.load() != 40;
  limited.stop();
  const bool budget = shared_ok.load() == 40 && own_over.load() == 0;
  return {identical && budget,
          fmt("HTTP and in-process report CSVs identical: %s (%zu scenario B, %zu scenario A bytes); "
              "16 concurrent clients admitted %d of 160 against a shared budget of 40, "
              "%d clients off their own budget",
              identical ? "yes" : "no", b_http.size(), a_http.size(), shared_ok.load(), own_over.load())};
}

}  // namespace
}  // namespace prlab

int main() {
  using namespace prlab;
  std::vector<std::pair<int, Outcome>> results;
  auto record = [&](int id, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %d: %s - %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    results.emplace_back(id, o);
  };
  record(1, attack_correctness);
  record(2, bouncer_exhibit);
  record(3, incoherent_pair_equivalence);
  record(4, bouncer_surrogates);
  std::optional<CreditRun> credit;
  std::string credit_error;
  try {
    credit = run_credit();
  } catch (const std::exception& e) {
    credit_error = e.what();
  }
  auto with_credit = [&](Outcome (*f)(const CreditRun&)) {
    return [&, f] { return credit ? f(*credit) : Outcome{false, "experiment failed: " + credit_error}; };
  };
  record(5, with_credit(credit_accuracy));
  record(6, with_credit(scenario_b_rates));
  record(7, with_credit(scenario_a_rate));
  record(8, with_credit(confidence_math));
  record(9, disparate_impact);
  record(10, gradient_check);
  record(11, wire_fidelity);
  const auto failed = std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.second.pass; });
  std::printf("%zu of %zu criteria pass\n", results.size() - failed, results.size());
  return failed == 0 ? 0 : 1;
}
