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

#include "audit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "core/error.hpp"

namespace prlab::audit {

using core::FeatureSpace;
using core::Instance;
using core::Label;

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index writes its
// own slot, so the caller's accumulation order stays fixed.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::jthread> pool;
  const unsigned count = std::min<std::size_t>(workers, n);
  for (unsigned w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

double uniform_value(const core::FeatureSpec& spec, std::mt19937_64& rng) {
  if (const auto* r = std::get_if<core::IntegerRange>(&spec.domain))
    return static_cast<double>(std::uniform_int_distribution<std::int64_t>(r->lo, r->hi)(rng));
  if (const auto* c = std::get_if<core::Categorical>(&spec.domain))
    return static_cast<double>(
        std::uniform_int_distribution<std::size_t>(0, c->values.size() - 1)(rng));
  const auto& r = std::get<core::RealInterval>(spec.domain);
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

void finish(AuditReport& report) {
  report.ip_rate = report.pairs_tested
                       ? static_cast<double>(report.ips_found.size()) /
                             static_cast<double>(report.pairs_tested)
                       : 0.0;
  report.confidence = confidence(report.ip_rate, report.pairs_tested);
}

}  // namespace

bool is_incoherent(const QueryRecord& a, const QueryRecord& b, const FeatureSpace& space) {
  return a.decision != b.decision && core::same_legit_part(a.instance, b.instance, space);
}

std::optional<IncoherentPair> find_ip_exhaustive(Oracle& oracle, const FeatureSpace& space) {
  core::AssignmentIndexer legit(space, {space.legit_indices().begin(), space.legit_indices().end()});
  core::AssignmentIndexer disc(space, {space.discriminative_indices().begin(),
                                       space.discriminative_indices().end()});
  if (legit.count() > core::kMaxEnumeratedInstances / disc.count())
    fail(ErrorCode::kCapacity, "space too large for exhaustive incoherent-pair search");
  std::uint64_t clock = 0;
  Instance x{std::vector<double>(space.size())};
  for (std::uint64_t l = 0; l < legit.count(); ++l) {
    legit.assign(l, x);
    disc.assign(0, x);
    auto r0 = oracle.query(x);
    QueryRecord first{x, r0.decision, std::move(r0.explanation), clock++};
    for (std::uint64_t d = 1; d < disc.count(); ++d) {
      disc.assign(d, x);
      auto r = oracle.query(x);
      if (r.decision != first.decision)
        return IncoherentPair{std::move(first), {x, r.decision, std::move(r.explanation), clock++}};
      ++clock;
    }
  }
  return std::nullopt;
}

AuditReport scenario_a_probe(std::span<const Instance> seeds, Oracle& oracle,
                             const FeatureSpace& space, std::uint64_t trials,
                             std::uint64_t rng_seed, const AuditOptions& opts) {
  if (seeds.empty()) fail(ErrorCode::kInvalidArgument, "scenario A needs at least one seed profile");
  if (trials == 0) fail(ErrorCode::kInvalidArgument, "scenario A needs at least one trial");
  const auto disc = space.discriminative_indices();
  if (disc.empty()) fail(ErrorCode::kInvalidArgument, "space has no discriminative feature");
  for (const auto& s : seeds) space.check(s);

  struct Trial {
    QueryRecord original, modified;
  };
  std::vector<Trial> results(trials);
  parallel_for(trials, opts.workers, [&](std::size_t t) {
    auto rng = trial_rng(rng_seed, t);
    const auto s = std::uniform_int_distribution<std::size_t>(0, seeds.size() - 1)(rng);
    const auto f = disc[std::uniform_int_distribution<std::size_t>(0, disc.size() - 1)(rng)];
    Instance modified = seeds[s];
    modified[f] = uniform_value(space.feature(f), rng);
    auto a = oracle.query(seeds[s]);
    auto b = oracle.query(modified);
    results[t] = {{seeds[s], a.decision, std::move(a.explanation), 2 * t},
                  {std::move(modified), b.decision, std::move(b.explanation), 2 * t + 1}};
  });

  AuditReport report;
  report.features = "scenario_a";
  report.queries_issued = 2 * trials;
  report.pairs_tested = trials;
  for (auto& r : results) {
    if (r.original.decision != r.modified.decision)
      report.ips_found.push_back({std::move(r.original), std::move(r.modified)});
  }
  finish(report);
  return report;
}

AuditReport scenario_b_swap(std::span<const Instance> profiles, Oracle& oracle,
                            const FeatureSpace& space, std::span<const std::size_t> swap_set,
                            const AuditOptions& opts) {
  if (profiles.size() < 2) fail(ErrorCode::kInvalidArgument, "scenario B needs at least two profiles");
  if (swap_set.empty()) fail(ErrorCode::kInvalidArgument, "empty swap set");
  for (std::size_t f : swap_set) {
    if (f >= space.size() || !space.feature(f).is_discriminative())
      fail(ErrorCode::kInvalidArgument, "swap set must name discriminative features");
  }
  for (const auto& p : profiles) space.check(p);

  const std::size_t n = profiles.size();
  std::vector<QueryRecord> base(n);
  parallel_for(n, opts.workers, [&](std::size_t p) {
    auto r = oracle.query(profiles[p]);
    base[p] = {profiles[p], r.decision, std::move(r.explanation), p};
  });

  const std::size_t crafted_count = n * (n - 1);
  std::vector<QueryRecord> crafted(crafted_count);
  parallel_for(crafted_count, opts.workers, [&](std::size_t k) {
    const std::size_t p = k / (n - 1);
    std::size_t q = k % (n - 1);
    if (q >= p) ++q;
    Instance x = profiles[p];
    for (std::size_t f : swap_set) x[f] = profiles[q][f];
    auto r = oracle.query(x);
    crafted[k] = {std::move(x), r.decision, std::move(r.explanation), n + k};
  });

  AuditReport report;
  report.features = swap_set_label(swap_set, space);
  report.queries_issued = n + crafted_count;
  report.pairs_tested = crafted_count;
  for (std::size_t k = 0; k < crafted_count; ++k) {
    const std::size_t p = k / (n - 1);
    if (crafted[k].decision != base[p].decision)
      report.ips_found.push_back({base[p], std::move(crafted[k])});
  }
  finish(report);
  return report;
}

std::vector<IncoherentPair> check_coherence_log(std::span<const QueryRecord> records,
                                                const FeatureSpace& space) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i)
    groups[core::legit_key(records[i].instance, space)].push_back(i);
  std::vector<std::pair<std::size_t, std::size_t>> hits;
  for (const auto& [key, idx] : groups) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i : idx) (records[i].decision == Label::kPositive ? pos : neg).push_back(i);
    for (std::size_t a : pos) {
      for (std::size_t b : neg) hits.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(hits.begin(), hits.end());
  std::vector<IncoherentPair> out;
  out.reserve(hits.size());
  for (const auto& [a, b] : hits) out.push_back({records[a], records[b]});
  return out;
}

double confidence(double p, std::uint64_t n) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kInvalidArgument, "probability must lie in [0, 1]");
  if (n == 0 || p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log1p(-p));
}

std::uint64_t queries_needed(double p, double target_confidence) {
  if (!(p > 0.0 && p < 1.0))
    fail(ErrorCode::kDegenerate, "detection probability must lie strictly between 0 and 1");
  if (!(target_confidence > 0.0 && target_confidence < 1.0))
    fail(ErrorCode::kInvalidArgument, "target confidence must lie strictly between 0 and 1");
  const double estimate = std::log1p(-target_confidence) / std::log1p(-p);
  if (estimate > 1e18) fail(ErrorCode::kCapacity, "required query count overflows");
  auto n = static_cast<std::uint64_t>(std::max(1.0, std::ceil(estimate)));
  while (confidence(p, n) < target_confidence) ++n;
  while (n > 1 && confidence(p, n - 1) >= target_confidence) --n;
  return n;
}

std::string swap_set_label(std::span<const std::size_t> swap_set, const FeatureSpace& space) {
  std::string s;
  for (std::size_t f : swap_set) {
    if (!s.empty()) s += '+';
    s += space.feature(f).name;
  }
  return s;
}

RateSummary summarize(std::span<const AuditReport> per_model) {
  if (per_model.empty()) fail(ErrorCode::kInvalidArgument, "nothing to summarize");
  RateSummary s;
  s.features = per_model.front().features;
  double sum = 0.0;
  for (const auto& r : per_model) {
    s.pairs_tested += r.pairs_tested;
    s.ips_found += r.ips_found.size();
    sum += r.ip_rate;
  }
  const double m = static_cast<double>(per_model.size());
  s.rate = sum / m;
  double var = 0.0;
  for (const auto& r : per_model) var += (r.ip_rate - s.rate) * (r.ip_rate - s.rate);
  s.stddev = std::sqrt(var / m);
  return s;
}

void write_report_csv(std::ostream& out, std::span<const RateSummary> rows) {
  out << "features,pairs_tested,ips_found,rate,stddev\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.features << ',' << r.pairs_tested << ',' << r.ips_found << ',';
    std::snprintf(buf, sizeof buf, "%.6f,%.6f", r.rate, r.stddev);
    out << buf << '\n';
  }
}

void write_confidence_csv(std::ostream& out, std::span<const RateSummary> rows,
                          std::uint64_t max_n) {
  out << "features,rate,n,confidence\n";
  char buf[64];
  for (const auto& r : rows) {
    for (std::uint64_t n = 1; n <= max_n; ++n) {
      std::snprintf(buf, sizeof buf, "%.6f,%llu,%.6f", r.rate, static_cast<unsigned long long>(n),
                    confidence(r.rate, n));
      out << r.features << ',' << buf << '\n';
    }
  }
}

}  // namespace prlab::audit
