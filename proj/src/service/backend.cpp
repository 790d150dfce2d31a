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

#include "service/backend.hpp"

#include <fstream>
#include <span>

#include "core/error.hpp"

namespace prlab::service {

Mode parse_mode(const std::string& s) {
  if (s == "honest") return Mode::kHonest;
  if (s == "pr_attack") return Mode::kPrAttack;
  fail(ErrorCode::kInvalidArgument, "mode must be honest or pr_attack, got '" + s + "'");
}

const char* mode_name(Mode m) { return m == Mode::kHonest ? "honest" : "pr_attack"; }

Backend Backend::from_tree(tree::DecisionTree t) {
  Backend b;
  b.kind_ = Kind::kTree;
  b.space_ = t.space_ptr();
  b.tree_ = std::make_shared<const tree::DecisionTree>(std::move(t));
  return b;
}

Backend Backend::from_mlp(std::shared_ptr<const core::FeatureSpace> space, credit::MlpModel m) {
  if (!space) fail(ErrorCode::kInvalidArgument, "mlp backend needs a feature space");
  if (m.params().inputs() != space->size())
    fail(ErrorCode::kInvalidArgument, "mlp input width does not match the feature space");
  Backend b;
  b.kind_ = Kind::kMlp;
  b.space_ = std::move(space);
  b.mlp_ = std::make_shared<const credit::MlpModel>(std::move(m));
  return b;
}

Backend Backend::from_json(const nlohmann::json& j) {
  try {
    auto space = std::make_shared<const core::FeatureSpace>(core::FeatureSpace::from_json(j.at("space")));
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "tree") return from_tree(tree::DecisionTree::from_json(j.at("tree"), space));
    if (kind == "mlp") return from_mlp(space, credit::MlpModel::from_json(j.at("mlp")));
    fail(ErrorCode::kParse, "model kind must be tree or mlp");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed model file: ") + e.what());
  }
}

Backend Backend::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json Backend::to_json() const {
  nlohmann::json j{{"space", space_->to_json()}};
  if (kind_ == Kind::kTree) {
    j["kind"] = "tree";
    j["tree"] = tree_->to_json();
  } else {
    j["kind"] = "mlp";
    j["mlp"] = mlp_->to_json();
  }
  return j;
}

void Backend::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  out << to_json().dump(2) << '\n';
  if (!out) fail(ErrorCode::kIo, "write failed for " + path);
}

const core::Classifier& Backend::classifier() const {
  if (kind_ == Kind::kTree) return *tree_;
  return *mlp_;
}

namespace {

// Point explanation: one equality per listed feature.
explain::Explanation point_explanation(const core::Instance& x, core::Label y,
                                       std::span<const std::size_t> features) {
  explain::Explanation a;
  a.label = y;
  for (std::size_t f : features) a.predicates.push_back({{f, tree::Equals{x[f]}}, true});
  return a;
}

}  // namespace

explain::Explanation Backend::explain(const core::Instance& x, core::Label y, Mode mode) const {
  if (kind_ == Kind::kTree) {
    if (mode == Mode::kHonest) return tree_->path_explanation(x);
    auto a = tree::pr_attack_prune(*tree_, x).path_explanation(x);
    a.provenance = explain::Provenance::kSurrogate;
    return a;
  }
  // The network has no symbolic explanation of its own; the honest reply
  // points at the full input, the attack reply at the legit part only, which
  // is the explanation of the Dirac surrogate anchored at x.
  if (mode == Mode::kHonest) {
    std::vector<std::size_t> all(space_->size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return point_explanation(x, y, all);
  }
  auto a = point_explanation(x, y, space_->legit_indices());
  a.provenance = explain::Provenance::kSurrogate;
  return a;
}

ClassifyReply handle_classify(const Backend& backend, Mode mode, const core::Instance& x,
                              std::uint64_t query_id) {
  backend.space().check(x);
  ClassifyReply r;
  r.decision = backend.decide(x);
  r.explanation = backend.explain(x, r.decision, mode);
  r.query_id = query_id;
  return r;
}

}  // namespace prlab::service
