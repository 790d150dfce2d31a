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

#include "credit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "core/error.hpp"

namespace prlab::credit {

std::vector<std::vector<std::size_t>> default_swap_sets(const core::FeatureSpace& space,
                                                        const nlohmann::json& config) {
  const auto map = discriminative_feature_map(config);
  std::vector<std::vector<std::size_t>> sets;
  std::vector<std::size_t> all;
  for (const auto& attr : kDiscriminativeAttributes) {
    const std::size_t col = map.at(attr);
    if (!space.feature(col).is_discriminative())
      fail(ErrorCode::kInvalidArgument, "column for " + attr + " is not tagged discriminative");
    sets.push_back({col});
    all.push_back(col);
  }
  sets.push_back(all);
  return sets;
}

std::vector<core::Instance> holdout_profiles(const std::vector<CreditRecord>& records,
                                             std::size_t train_rows, std::size_t count,
                                             std::uint64_t seed) {
  if (train_rows >= records.size() || records.size() - train_rows < count)
    fail(ErrorCode::kInvalidArgument, "validation split too small for the requested profiles");
  std::vector<std::size_t> pool(records.size() - train_rows);
  std::iota(pool.begin(), pool.end(), train_rows);
  std::vector<std::size_t> picked;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x686f6c64u};
  std::mt19937_64 rng(seq);
  std::sample(pool.begin(), pool.end(), std::back_inserter(picked), count, rng);
  std::vector<core::Instance> out;
  for (std::size_t i : picked) out.push_back(to_instance(records[i]));
  return out;
}

ExperimentResult run_credit_experiment(const std::vector<CreditRecord>& records,
                                       const core::FeatureSpace& space,
                                       const ExperimentSpec& spec) {
  if (spec.models == 0) fail(ErrorCode::kInvalidArgument, "experiment needs at least one model");
  if (spec.swap_sets.empty()) fail(ErrorCode::kInvalidArgument, "experiment needs swap sets");
  if (space.size() != kGermanFeatureCount)
    fail(ErrorCode::kInvalidArgument, "credit space must have 24 features");
  const core::Dataset data = to_dataset(records);
  for (const auto& x : data.instances) space.check(x);

  ExperimentResult result;
  result.runs.resize(spec.models);
  result.epochs = spec.train.epochs;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t m = next++; m < spec.models; m = next++) {
      try {
        ModelRun run;
        run.seed = spec.base_seed + m;
        TrainSpec ts = spec.train;
        ts.seed = run.seed;
        const TrainResult trained = train_mlp(data, ts);
        run.validation_accuracy = trained.validation_accuracy;
        const auto profiles =
            holdout_profiles(records, trained.train_rows, spec.profiles, run.seed);
        audit::ClassifierOracle oracle(trained.model);
        run.scenario_a = audit::scenario_a_probe(profiles, oracle, space, spec.trials, run.seed);
        for (const auto& set : spec.swap_sets)
          run.scenario_b.push_back(audit::scenario_b_swap(profiles, oracle, space, set));
        result.runs[m] = std::move(run);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = spec.models;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const unsigned n = std::max(1u, std::min<unsigned>(spec.workers, spec.models));
    for (unsigned w = 0; w < n; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  double sum = 0.0;
  for (const auto& r : result.runs) sum += r.validation_accuracy;
  result.mean_accuracy = sum / static_cast<double>(spec.models);
  double var = 0.0;
  for (const auto& r : result.runs)
    var += (r.validation_accuracy - result.mean_accuracy) * (r.validation_accuracy - result.mean_accuracy);
  result.stddev_accuracy = std::sqrt(var / static_cast<double>(spec.models));

  std::vector<audit::AuditReport> a;
  for (const auto& r : result.runs) a.push_back(r.scenario_a);
  result.scenario_a = audit::summarize(a);
  for (std::size_t s = 0; s < spec.swap_sets.size(); ++s) {
    std::vector<audit::AuditReport> b;
    for (const auto& r : result.runs) b.push_back(r.scenario_b[s]);
    result.scenario_b.push_back(audit::summarize(b));
  }
  return result;
}

void write_metrics_csv(std::ostream& out, const ExperimentResult& result) {
  out << "seed,epoch,val_accuracy\n";
  char buf[96];
  for (const auto& r : result.runs) {
    std::snprintf(buf, sizeof buf, "%llu,%d,%.6f\n", static_cast<unsigned long long>(r.seed), result.epochs,
                  r.validation_accuracy);
    out << buf;
  }
}

void write_replication_report(std::ostream& out, const ExperimentResult& result,
                              double target_confidence) {
  using R = ReferenceFigures;
  char buf[256];
  std::snprintf(buf, sizeof buf, "models: %zu\n", result.runs.size());
  out << buf;
  std::snprintf(buf, sizeof buf,
                "validation accuracy: mean %.2f%% sd %.2f%% (published %.2f%% sd %.2f%%)\n",
                100 * result.mean_accuracy, 100 * result.stddev_accuracy, 100 * R::kAccuracy,
                100 * R::kAccuracyStddev);
  out << buf;
  std::snprintf(buf, sizeof buf, "scenario A: IP rate %.2f%% sd %.2f%% (published %.2f%% sd %.2f%%)\n",
                100 * result.scenario_a.rate, 100 * result.scenario_a.stddev,
                100 * R::kScenarioARate, 100 * R::kScenarioAStddev);
  out << buf;
  out << "scenario B label-change rates:\n";
  const int target_pct = static_cast<int>(std::lround(100 * target_confidence));
  for (std::size_t i = 0; i < result.scenario_b.size(); ++i) {
    const auto& s = result.scenario_b[i];
    std::uint64_t ours = 0;
    if (s.rate > 0.0 && s.rate < 1.0) ours = audit::queries_needed(s.rate, target_confidence);
    std::snprintf(buf, sizeof buf, "  %-40s rate %.2f%% sd %.2f%%  pairs for %d%%: %llu",
                  s.features.c_str(), 100 * s.rate, 100 * s.stddev, target_pct,
                  static_cast<unsigned long long>(ours));
    out << buf;
    if (i < R::kSwapRates.size() && result.scenario_b.size() == R::kSwapRates.size()) {
      const std::uint64_t from_published =
          audit::queries_needed(R::kSwapRates[i], target_confidence);
      std::snprintf(buf, sizeof buf,
                    "  | published rate %.2f%% sd %.2f%%, published pairs %llu, closed form on "
                    "published rate %llu",
                    100 * R::kSwapRates[i], 100 * R::kSwapStddevs[i],
                    static_cast<unsigned long long>(R::kPairsFor99[i]),
                    static_cast<unsigned long long>(from_published));
      out << buf;
    }
    out << '\n';
  }
  out << "note: pair counts use n = ceil(ln(1 - c) / ln(1 - p)). Applied to the published rates "
         "this gives smaller counts than the published ones; no formula reconciles the two, "
         "so both are shown.\n";
}

}  // namespace prlab::credit
