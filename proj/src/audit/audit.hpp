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
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "core/classifier.hpp"
#include "core/feature_space.hpp"
#include "explain/explanation.hpp"

namespace prlab::audit {

struct QueryResult {
  core::Label decision = core::Label::kNegative;
  std::optional<explain::Explanation> explanation;
};

// Black-box access to a remote or local model. Implementations used with more
// than one worker must be safe to call concurrently.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual QueryResult query(const core::Instance& x) = 0;
};

// Oracle over an in-process classifier; returns decisions only.
class ClassifierOracle final : public Oracle {
 public:
  explicit ClassifierOracle(const core::Classifier& c) : classifier_(&c) {}
  QueryResult query(const core::Instance& x) override { return {classifier_->classify(x), {}}; }

 private:
  const core::Classifier* classifier_;
};

struct QueryRecord {
  core::Instance instance;
  core::Label decision = core::Label::kNegative;
  std::optional<explain::Explanation> explanation;
  std::uint64_t timestamp = 0;
};

struct IncoherentPair {
  QueryRecord first;
  QueryRecord second;
};

// Equal legit parts (bitwise) and different decisions.
bool is_incoherent(const QueryRecord& a, const QueryRecord& b, const core::FeatureSpace& space);

struct AuditReport {
  std::string features;  // swap set or scenario label
  std::uint64_t queries_issued = 0;
  std::uint64_t pairs_tested = 0;
  std::vector<IncoherentPair> ips_found;
  double ip_rate = 0.0;
  // Probability that an audit of pairs_tested independent pairs at ip_rate
  // surfaces at least one incoherent pair.
  double confidence = 0.0;
};

struct AuditOptions {
  // Concurrent oracle queries. Results do not depend on this value.
  unsigned workers = 1;
};

std::optional<IncoherentPair> find_ip_exhaustive(Oracle& oracle, const core::FeatureSpace& space);

// Random overwrite of one discriminative feature per trial; trial t draws from
// an RNG seeded with (rng_seed, t).
AuditReport scenario_a_probe(std::span<const core::Instance> seeds, Oracle& oracle,
                             const core::FeatureSpace& space, std::uint64_t trials,
                             std::uint64_t rng_seed, const AuditOptions& opts = {});

// Swaps swap_set features of every profile with those of every other profile.
AuditReport scenario_b_swap(std::span<const core::Instance> profiles, Oracle& oracle,
                            const core::FeatureSpace& space,
                            std::span<const std::size_t> swap_set,
                            const AuditOptions& opts = {});

// All incoherent pairs in the log, ordered by (first, second) log position.
std::vector<IncoherentPair> check_coherence_log(std::span<const QueryRecord> records,
                                                const core::FeatureSpace& space);

// 1 - (1 - p)^n
double confidence(double p, std::uint64_t n);
// Smallest n with confidence(p, n) >= target.
std::uint64_t queries_needed(double p, double target_confidence);

std::string swap_set_label(std::span<const std::size_t> swap_set, const core::FeatureSpace& space);

// Aggregate of one swap set over several models.
struct RateSummary {
  std::string features;
  std::uint64_t pairs_tested = 0;
  std::uint64_t ips_found = 0;
  double rate = 0.0;    // mean of per-model rates
  double stddev = 0.0;  // population standard deviation across models
};

RateSummary summarize(std::span<const AuditReport> per_model);

void write_report_csv(std::ostream& out, std::span<const RateSummary> rows);
// Rows (features, rate, n, confidence) for n = 1..max_n.
void write_confidence_csv(std::ostream& out, std::span<const RateSummary> rows,
                          std::uint64_t max_n);

}  // namespace prlab::audit
