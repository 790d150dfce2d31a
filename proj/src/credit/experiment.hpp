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

#include <array>
#include <cstdint>
#include <ostream>
#include <vector>

#include "audit/audit.hpp"
#include "core/feature_space.hpp"
#include "credit/german.hpp"
#include "credit/mlp.hpp"

namespace prlab::credit {

// Published figures for the German Credit replication; printed next to our
// measurements, never used as test expectations on their own.
struct ReferenceFigures {
  static constexpr double kAccuracy = 0.7697;
  static constexpr double kAccuracyStddev = 0.0092;
  static constexpr double kScenarioARate = 0.0809;
  static constexpr double kScenarioAStddev = 0.0408;
  // employment, sex_status, age, foreigner, all four
  static constexpr std::array<double, 5> kSwapRates = {0.0186, 0.0027, 0.0140, 0.0227, 0.0425};
  static constexpr std::array<double, 5> kSwapStddevs = {0.0148, 0.0051, 0.0165, 0.0217, 0.0313};
  static constexpr std::array<std::uint64_t, 5> kPairsFor99 = {490, 2555, 368, 301, 160};
};

struct ExperimentSpec {
  std::size_t models = 30;
  std::uint64_t base_seed = 1;
  TrainSpec train;
  std::size_t profiles = 50;    // held-out profiles per model
  std::uint64_t trials = 500;   // scenario A draws per model
  unsigned workers = 1;         // models trained concurrently
  // Empty means each discriminative attribute alone, then all four together.
  std::vector<std::vector<std::size_t>> swap_sets;
};

struct ModelRun {
  std::uint64_t seed = 0;
  double validation_accuracy = 0.0;
  audit::AuditReport scenario_a;
  std::vector<audit::AuditReport> scenario_b;
};

struct ExperimentResult {
  std::vector<ModelRun> runs;
  int epochs = 0;
  double mean_accuracy = 0.0;
  double stddev_accuracy = 0.0;
  audit::RateSummary scenario_a;
  std::vector<audit::RateSummary> scenario_b;
};

std::vector<std::vector<std::size_t>> default_swap_sets(const core::FeatureSpace& space,
                                                        const nlohmann::json& config);

// Trains `models` networks with seeds base_seed, base_seed + 1, ... and audits
// each on profiles drawn from its own validation split.
ExperimentResult run_credit_experiment(const std::vector<CreditRecord>& records,
                                       const core::FeatureSpace& space,
                                       const ExperimentSpec& spec);

// Held-out profiles for one model: a seeded sample of the validation rows.
std::vector<core::Instance> holdout_profiles(const std::vector<CreditRecord>& records,
                                             std::size_t train_rows, std::size_t count,
                                             std::uint64_t seed);

void write_metrics_csv(std::ostream& out, const ExperimentResult& result);

// Human-readable comparison of our figures with the published ones, including
// closed-form query counts for the target confidence.
void write_replication_report(std::ostream& out, const ExperimentResult& result,
                              double target_confidence);

}  // namespace prlab::credit
