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
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core/classifier.hpp"
#include "core/feature_space.hpp"
#include "explain/explanation.hpp"
#include "json.hpp"
#include "tree/predicate.hpp"

namespace prlab::tree {

struct TreeNode {
  std::optional<NodePredicate> predicate;  // empty for leaves
  core::Label label = core::Label::kNegative;
  std::int32_t if_true = -1;
  std::int32_t if_false = -1;

  bool is_leaf() const { return !predicate.has_value(); }
};

// Proper binary tree stored in preorder; node 0 is the root. Immutable once
// built, so concurrent prediction and explanation are safe.
class DecisionTree final : public core::Classifier {
 public:
  using SpacePtr = std::shared_ptr<const core::FeatureSpace>;

  static DecisionTree leaf(SpacePtr space, core::Label y);
  static DecisionTree split(NodePredicate predicate, const DecisionTree& if_true,
                            const DecisionTree& if_false);

  // {"label": 0|1} or {"feature", "op", ..., "yes": node, "no": node}
  static DecisionTree from_json(const nlohmann::json& root, SpacePtr space);
  nlohmann::json to_json() const;

  core::Label classify(const core::Instance& x) const override;
  // As classify, after checking that x conforms to the space.
  core::Label predict(const core::Instance& x) const;
  explain::Explanation path_explanation(const core::Instance& x) const;

  bool uses_discriminative() const;
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t depth() const;

  const core::FeatureSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  // Structural equality: same shape, predicates and leaf labels.
  friend bool operator==(const DecisionTree& a, const DecisionTree& b);

 private:
  DecisionTree(SpacePtr space, std::vector<TreeNode> nodes);
  void validate() const;

  SpacePtr space_;
  std::vector<TreeNode> nodes_;
};

enum class PruneMode {
  // Splice out discriminative nodes anywhere in the tree, keeping every legit
  // subtree. The result equals the original with X_d fixed at x_d.
  kSpliceDiscriminative,
  // Follow the query path only: discriminative nodes are spliced, untaken legit
  // branches collapse to a leaf carrying the opposite decision.
  kPathOnly,
};

// Per-query surrogate that never tests a discriminative feature and agrees
// with `t` on x.
DecisionTree pr_attack_prune(const DecisionTree& t, const core::Instance& x,
                             PruneMode mode = PruneMode::kSpliceDiscriminative);

struct TrainConfig {
  int max_depth = 5;
  std::size_t min_samples_split = 2;
  // Features allowed in splits; empty means every feature.
  std::set<std::size_t> feature_whitelist;
};

// Greedy CART induction with Gini impurity. Candidate thresholds are midpoints
// of consecutive distinct values, categorical splits are one-vs-rest. Ties go
// to the lower feature index, then the lower threshold or category.
DecisionTree train(const core::Dataset& data, DecisionTree::SpacePtr space,
                   const TrainConfig& cfg);

}  // namespace prlab::tree
