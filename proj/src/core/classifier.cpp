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

#include "core/classifier.hpp"

#include <numeric>

#include "core/error.hpp"

namespace prlab::core {

namespace {

std::vector<std::size_t> all_features(const FeatureSpace& space) {
  std::vector<std::size_t> idx(space.size());
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

std::vector<std::size_t> legit_features(const FeatureSpace& space) {
  return {space.legit_indices().begin(), space.legit_indices().end()};
}

AssignmentIndexer checked_legit_indexer(const FeatureSpace& space) {
  AssignmentIndexer legit(space, legit_features(space));
  if (legit.count() == 0) fail(ErrorCode::kInvalidArgument, "no legit assignment");
  if (legit.count() > kMaxLegitAssignments) {
    fail(ErrorCode::kCapacity, std::to_string(legit.count()) +
                                   " legit assignments exceed the tabulation limit of " +
                                   std::to_string(kMaxLegitAssignments));
  }
  return legit;
}

}  // namespace

TabulatedClassifier::TabulatedClassifier(const FeatureSpace& space,
                                         std::vector<std::size_t> key_features,
                                         std::vector<Label> table)
    : indexer_(space, std::move(key_features)), table_(std::move(table)) {
  if (table_.size() != indexer_.count())
    fail(ErrorCode::kInvalidArgument, "truth table size does not match the key space");
}

Label TabulatedClassifier::classify(const Instance& x) const {
  return table_[indexer_.index_of(x)];
}

DiracSurrogate::DiracSurrogate(const FeatureSpace& space, const Instance& x, Label y)
    : space_(&space), anchor_(x), label_(y) {
  space.check(x);
}

Label DiracSurrogate::classify(const Instance& x) const {
  return same_legit_part(x, anchor_, *space_) ? label_ : flip(label_);
}

bool is_legitimate(const Classifier& c, const FeatureSpace& space) {
  AssignmentIndexer legit(space, legit_features(space));
  AssignmentIndexer disc(space, {space.discriminative_indices().begin(),
                                 space.discriminative_indices().end()});
  if (legit.count() > kMaxEnumeratedInstances / disc.count())
    fail(ErrorCode::kCapacity, "space too large for an exhaustive legitimacy check");
  Instance x{std::vector<double>(space.size())};
  for (std::uint64_t l = 0; l < legit.count(); ++l) {
    legit.assign(l, x);
    disc.assign(0, x);
    const Label first = c.classify(x);
    for (std::uint64_t d = 1; d < disc.count(); ++d) {
      disc.assign(d, x);
      if (c.classify(x) != first) return false;
    }
  }
  return true;
}

std::vector<TabulatedClassifier> enumerate_legit_classifiers(const FeatureSpace& space) {
  const AssignmentIndexer legit = checked_legit_indexer(space);
  const std::uint64_t n = legit.count();
  std::vector<TabulatedClassifier> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    std::vector<Label> table(n);
    for (std::uint64_t k = 0; k < n; ++k)
      table[k] = ((bits >> k) & 1) ? Label::kPositive : Label::kNegative;
    out.emplace_back(space, legit_features(space), std::move(table));
  }
  return out;
}

PrCount count_pr_functions(const FeatureSpace& space, const Instance& x, Label y) {
  space.check(x);
  PrCount count;
  for (const auto& c : enumerate_legit_classifiers(space)) {
    ++count.total_count;
    if (c.classify(x) == y) ++count.pr_count;
  }
  return count;
}

std::vector<TabulatedClassifier> enumerate_all_classifiers(const FeatureSpace& space) {
  AssignmentIndexer all(space, all_features(space));
  if (all.count() > 16)
    fail(ErrorCode::kCapacity, "full tabulation limited to 16 instances");
  const std::uint64_t n = all.count();
  std::vector<TabulatedClassifier> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    std::vector<Label> table(n);
    for (std::uint64_t k = 0; k < n; ++k)
      table[k] = ((bits >> k) & 1) ? Label::kPositive : Label::kNegative;
    out.emplace_back(space, all_features(space), std::move(table));
  }
  return out;
}

}  // namespace prlab::core
