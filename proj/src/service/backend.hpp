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

#include <memory>
#include <string>

#include "core/feature_space.hpp"
#include "credit/mlp.hpp"
#include "explain/explanation.hpp"
#include "json.hpp"
#include "tree/decision_tree.hpp"
#include "service/wire.hpp"

namespace prlab::service {

enum class Mode { kHonest, kPrAttack };

Mode parse_mode(const std::string& s);
const char* mode_name(Mode m);

// A served model and its feature space. Immutable; shared between request
// handlers without locking.
class Backend {
 public:
  enum class Kind { kTree, kMlp };

  static Backend from_tree(tree::DecisionTree t);
  static Backend from_mlp(std::shared_ptr<const core::FeatureSpace> space, credit::MlpModel m);

  // {"kind": "tree"|"mlp", "space": {...}, "tree": node} or {..., "mlp": {...}}
  static Backend from_json(const nlohmann::json& j);
  static Backend load(const std::string& path);
  nlohmann::json to_json() const;
  void save(const std::string& path) const;

  Kind kind() const { return kind_; }
  const core::FeatureSpace& space() const { return *space_; }
  const std::shared_ptr<const core::FeatureSpace>& space_ptr() const { return space_; }
  const core::Classifier& classifier() const;
  const tree::DecisionTree* tree() const { return tree_.get(); }
  const credit::MlpModel* mlp() const { return mlp_.get(); }

  core::Label decide(const core::Instance& x) const { return classifier().classify(x); }

  // Honest: the model's own explanation of x. Attack: explanation of a
  // per-query legit surrogate that agrees with the model on x.
  explain::Explanation explain(const core::Instance& x, core::Label y, Mode mode) const;

 private:
  Kind kind_ = Kind::kTree;
  std::shared_ptr<const core::FeatureSpace> space_;
  std::shared_ptr<const tree::DecisionTree> tree_;
  std::shared_ptr<const credit::MlpModel> mlp_;
};

// Pure request handler: the server adds rate limiting and query ids.
ClassifyReply handle_classify(const Backend& backend, Mode mode, const core::Instance& x,
                              std::uint64_t query_id);

}  // namespace prlab::service
