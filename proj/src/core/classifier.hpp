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

#include <cstdint>
#include <vector>

#include "core/feature_space.hpp"

namespace prlab::core {

// Total, deterministic decision function over a feature space. Implementations
// are immutable after construction and safe to evaluate concurrently.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Label classify(const Instance& x) const = 0;
};

// Truth table keyed by the assignment index of `key_features`. Keying on the
// legit features gives a classifier that ignores X_d by construction; keying on
// every feature tabulates an arbitrary function.
class TabulatedClassifier final : public Classifier {
 public:
  TabulatedClassifier(const FeatureSpace& space, std::vector<std::size_t> key_features,
                      std::vector<Label> table);

  Label classify(const Instance& x) const override;
  const std::vector<Label>& table() const { return table_; }

 private:
  AssignmentIndexer indexer_;
  std::vector<Label> table_;
};

// Legitimate surrogate that agrees with y exactly on the legit part of x and
// returns the opposite label everywhere else.
class DiracSurrogate final : public Classifier {
 public:
  DiracSurrogate(const FeatureSpace& space, const Instance& x, Label y);

  Label classify(const Instance& x) const override;
  const Instance& anchor() const { return anchor_; }
  Label anchor_label() const { return label_; }

 private:
  const FeatureSpace* space_;
  Instance anchor_;
  Label label_;
};

class ConstantClassifier final : public Classifier {
 public:
  explicit ConstantClassifier(Label y) : label_(y) {}
  Label classify(const Instance&) const override { return label_; }

 private:
  Label label_;
};

// Desk-scale oracles. All of them refuse real-valued domains.
inline constexpr std::uint64_t kMaxLegitAssignments = 20;
inline constexpr std::uint64_t kMaxEnumeratedInstances = std::uint64_t{1} << 24;

// Exhaustive check that the decision never depends on X_d.
bool is_legitimate(const Classifier& c, const FeatureSpace& space);

std::vector<TabulatedClassifier> enumerate_legit_classifiers(const FeatureSpace& space);

struct PrCount {
  std::uint64_t pr_count = 0;
  std::uint64_t total_count = 0;
};

// Counts legit classifiers C' with C'(x_l) = y.
PrCount count_pr_functions(const FeatureSpace& space, const Instance& x, Label y);

// Every classifier tabulated over the full space (2^|X| of them); used to
// cross-check legitimacy and incoherent-pair claims.
std::vector<TabulatedClassifier> enumerate_all_classifiers(const FeatureSpace& space);

}  // namespace prlab::core
