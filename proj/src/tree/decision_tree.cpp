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

#include "tree/decision_tree.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "core/error.hpp"

namespace prlab::tree {

using core::Instance;
using core::Label;

DecisionTree::DecisionTree(SpacePtr space, std::vector<TreeNode> nodes)
    : space_(std::move(space)), nodes_(std::move(nodes)) {
  if (!space_) fail(ErrorCode::kInvalidArgument, "tree needs a feature space");
  validate();
}

void DecisionTree::validate() const {
  if (nodes_.empty()) fail(ErrorCode::kInvalidArgument, "empty tree");
  // Preorder layout: every internal node's true child follows it directly and
  // both children lie strictly after it, so the structure is acyclic.
  std::vector<int> parents(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.is_leaf()) {
      if (n.if_true != -1 || n.if_false != -1)
        fail(ErrorCode::kInvalidArgument, "leaf with children");
      continue;
    }
    n.predicate->validate(*space_);
    const auto t = static_cast<std::size_t>(n.if_true);
    const auto f = static_cast<std::size_t>(n.if_false);
    if (n.if_true < 0 || n.if_false < 0 || t >= nodes_.size() || f >= nodes_.size() || t != i + 1 ||
        f <= t)
      fail(ErrorCode::kInvalidArgument, "internal node must have two children in preorder");
    ++parents[t];
    ++parents[f];
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (parents[i] != 1) fail(ErrorCode::kInvalidArgument, "node reachable more or less than once");
  }
}

DecisionTree DecisionTree::leaf(SpacePtr space, Label y) {
  TreeNode n;
  n.label = y;
  return DecisionTree(std::move(space), {n});
}

DecisionTree DecisionTree::split(NodePredicate predicate, const DecisionTree& if_true,
                                 const DecisionTree& if_false) {
  if (if_true.space_ != if_false.space_ && !(*if_true.space_ == *if_false.space_))
    fail(ErrorCode::kInvalidArgument, "subtrees built over different spaces");
  std::vector<TreeNode> nodes;
  nodes.reserve(1 + if_true.nodes_.size() + if_false.nodes_.size());
  TreeNode root;
  root.predicate = std::move(predicate);
  root.if_true = 1;
  root.if_false = static_cast<std::int32_t>(1 + if_true.nodes_.size());
  nodes.push_back(std::move(root));
  auto append = [&nodes](const std::vector<TreeNode>& sub) {
    const auto offset = static_cast<std::int32_t>(nodes.size());
    for (TreeNode n : sub) {
      if (!n.is_leaf()) {
        n.if_true += offset;
        n.if_false += offset;
      }
      nodes.push_back(std::move(n));
    }
  };
  append(if_true.nodes_);
  append(if_false.nodes_);
  return DecisionTree(if_true.space_, std::move(nodes));
}

DecisionTree DecisionTree::from_json(const nlohmann::json& root, SpacePtr space) {
  std::function<DecisionTree(const nlohmann::json&, int)> parse =
      [&](const nlohmann::json& j, int depth) -> DecisionTree {
    if (depth > 4096) fail(ErrorCode::kParse, "tree too deep");
    if (!j.is_object()) fail(ErrorCode::kParse, "tree node must be an object");
    if (j.contains("label")) {
      if (j.size() != 1) fail(ErrorCode::kParse, "leaf carries extra fields");
      return leaf(space, core::label_from_int(j.at("label").get<long long>()));
    }
    if (!j.contains("yes") || !j.contains("no"))
      fail(ErrorCode::kParse, "internal node needs 'yes' and 'no' children");
    return split(NodePredicate::from_json(j, *space), parse(j.at("yes"), depth + 1),
                 parse(j.at("no"), depth + 1));
  };
  try {
    return parse(root, 0);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed tree: ") + e.what());
  }
}

nlohmann::json DecisionTree::to_json() const {
  std::function<nlohmann::json(std::size_t)> emit = [&](std::size_t i) -> nlohmann::json {
    const auto& n = nodes_[i];
    if (n.is_leaf()) return {{"label", core::to_int(n.label)}};
    nlohmann::json j = n.predicate->to_json(*space_);
    j["yes"] = emit(static_cast<std::size_t>(n.if_true));
    j["no"] = emit(static_cast<std::size_t>(n.if_false));
    return j;
  };
  return emit(0);
}

Label DecisionTree::classify(const Instance& x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(n.predicate->evaluate(x) ? n.if_true : n.if_false);
  }
  return nodes_[i].label;
}

Label DecisionTree::predict(const Instance& x) const {
  space_->check(x);
  return classify(x);
}

explain::Explanation DecisionTree::path_explanation(const Instance& x) const {
  space_->check(x);
  explain::Explanation a;
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    const bool outcome = n.predicate->evaluate(x);
    a.predicates.push_back({*n.predicate, outcome});
    i = static_cast<std::size_t>(outcome ? n.if_true : n.if_false);
  }
  a.label = nodes_[i].label;
  return a;
}

bool DecisionTree::uses_discriminative() const {
  return std::any_of(nodes_.begin(), nodes_.end(), [&](const TreeNode& n) {
    return !n.is_leaf() && space_->feature(n.predicate->feature).is_discriminative();
  });
}

std::size_t DecisionTree::depth() const {
  std::function<std::size_t(std::size_t)> d = [&](std::size_t i) -> std::size_t {
    const auto& n = nodes_[i];
    if (n.is_leaf()) return 0;
    return 1 + std::max(d(static_cast<std::size_t>(n.if_true)),
                        d(static_cast<std::size_t>(n.if_false)));
  };
  return d(0);
}

bool operator==(const DecisionTree& a, const DecisionTree& b) {
  // Both are in canonical preorder, so positional comparison is structural.
  if (a.nodes_.size() != b.nodes_.size()) return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    const auto& x = a.nodes_[i];
    const auto& y = b.nodes_[i];
    if (x.is_leaf() != y.is_leaf()) return false;
    if (x.is_leaf() ? x.label != y.label
                    : (!(*x.predicate == *y.predicate) || x.if_false != y.if_false))
      return false;
  }
  return true;
}

DecisionTree pr_attack_prune(const DecisionTree& t, const Instance& x, PruneMode mode) {
  t.space().check(x);
  const auto& nodes = t.nodes();
  const auto& space = t.space();
  const Label y = t.classify(x);
  auto taken = [&](const TreeNode& n) {
    return static_cast<std::size_t>(n.predicate->evaluate(x) ? n.if_true : n.if_false);
  };
  auto is_disc = [&](const TreeNode& n) {
    return space.feature(n.predicate->feature).is_discriminative();
  };

  std::function<DecisionTree(std::size_t)> splice = [&](std::size_t i) -> DecisionTree {
    const auto& n = nodes[i];
    if (n.is_leaf()) return DecisionTree::leaf(t.space_ptr(), n.label);
    if (is_disc(n)) return splice(taken(n));
    return DecisionTree::split(*n.predicate, splice(static_cast<std::size_t>(n.if_true)),
                               splice(static_cast<std::size_t>(n.if_false)));
  };

  std::function<DecisionTree(std::size_t)> path_only = [&](std::size_t i) -> DecisionTree {
    const auto& n = nodes[i];
    if (n.is_leaf()) return DecisionTree::leaf(t.space_ptr(), n.label);
    if (is_disc(n)) return path_only(taken(n));
    const DecisionTree dummy = DecisionTree::leaf(t.space_ptr(), core::flip(y));
    if (n.predicate->evaluate(x))
      return DecisionTree::split(*n.predicate, path_only(static_cast<std::size_t>(n.if_true)), dummy);
    return DecisionTree::split(*n.predicate, dummy, path_only(static_cast<std::size_t>(n.if_false)));
  };

  return mode == PruneMode::kSpliceDiscriminative ? splice(0) : path_only(0);
}

namespace {

constexpr double kMinGain = 1e-12;
constexpr double kTieTolerance = 1e-12;

double gini(double pos, double total) {
  if (total <= 0) return 0.0;
  const double p = pos / total;
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

struct Candidate {
  NodePredicate predicate;
  double gain = 0.0;
};

}  // namespace

DecisionTree train(const core::Dataset& data, DecisionTree::SpacePtr space,
                   const TrainConfig& cfg) {
  if (!space) fail(ErrorCode::kInvalidArgument, "training needs a feature space");
  if (cfg.max_depth < 1) fail(ErrorCode::kInvalidArgument, "max_depth must be at least 1");
  if (cfg.min_samples_split < 1)
    fail(ErrorCode::kInvalidArgument, "min_samples_split must be positive");
  if (data.size() == 0) fail(ErrorCode::kInvalidArgument, "empty training set");
  if (data.labels.size() != data.size())
    fail(ErrorCode::kInvalidArgument, "training set needs one label per instance");
  for (const auto& x : data.instances) space->check(x);
  for (std::size_t f : cfg.feature_whitelist) {
    if (f >= space->size()) fail(ErrorCode::kInvalidArgument, "whitelisted feature out of range");
  }

  std::vector<std::size_t> features;
  for (std::size_t f = 0; f < space->size(); ++f) {
    if (cfg.feature_whitelist.empty() || cfg.feature_whitelist.count(f)) features.push_back(f);
  }

  auto positives = [&](const std::vector<std::size_t>& idx) {
    return static_cast<double>(std::count_if(idx.begin(), idx.end(), [&](std::size_t i) {
      return data.labels[i] == Label::kPositive;
    }));
  };

  auto best_split = [&](const std::vector<std::size_t>& idx) -> std::optional<Candidate> {
    const double n = static_cast<double>(idx.size());
    const double pos = positives(idx);
    const double parent = gini(pos, n);
    std::optional<Candidate> best;
    auto consider = [&](NodePredicate p, double left_n, double left_pos) {
      const double right_n = n - left_n;
      if (left_n == 0 || right_n == 0) return;
      const double gain = parent - (left_n / n) * gini(left_pos, left_n) -
                          (right_n / n) * gini(pos - left_pos, right_n);
      if (gain > kMinGain && (!best || gain > best->gain + kTieTolerance))
        best = Candidate{std::move(p), gain};
    };
    for (std::size_t f : features) {
      const auto& spec = space->feature(f);
      if (spec.is_categorical()) {
        const auto k = static_cast<std::size_t>(*spec.cardinality());
        std::vector<double> cnt(k, 0.0), cnt_pos(k, 0.0);
        for (std::size_t i : idx) {
          const auto c = static_cast<std::size_t>(data.instances[i][f]);
          cnt[c] += 1;
          if (data.labels[i] == Label::kPositive) cnt_pos[c] += 1;
        }
        for (std::size_t c = 0; c < k; ++c) {
          consider({f, InSet{{static_cast<double>(c)}}}, cnt[c], cnt_pos[c]);
        }
        continue;
      }
      std::vector<std::size_t> order = idx;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data.instances[a][f] < data.instances[b][f];
      });
      double left_n = 0, left_pos = 0;
      for (std::size_t r = 0; r + 1 < order.size(); ++r) {
        left_n += 1;
        if (data.labels[order[r]] == Label::kPositive) left_pos += 1;
        const double v = data.instances[order[r]][f];
        const double next = data.instances[order[r + 1]][f];
        if (v == next) continue;
        consider({f, LessEqual{v + (next - v) / 2}}, left_n, left_pos);
      }
    }
    return best;
  };

  std::function<DecisionTree(const std::vector<std::size_t>&, int)> build =
      [&](const std::vector<std::size_t>& idx, int depth) -> DecisionTree {
    const double pos = positives(idx);
    const double neg = static_cast<double>(idx.size()) - pos;
    const Label majority = pos > neg ? Label::kPositive : Label::kNegative;
    if (pos == 0 || neg == 0 || depth >= cfg.max_depth || idx.size() < cfg.min_samples_split)
      return DecisionTree::leaf(space, majority);
    auto best = best_split(idx);
    if (!best) return DecisionTree::leaf(space, majority);
    std::vector<std::size_t> yes, no;
    for (std::size_t i : idx) (best->predicate.evaluate(data.instances[i]) ? yes : no).push_back(i);
    return DecisionTree::split(best->predicate, build(yes, depth + 1), build(no, depth + 1));
  };

  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  return build(all, 0);
}

}  // namespace prlab::tree
