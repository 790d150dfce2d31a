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

#include <string>
#include <vector>

#include "core/feature_space.hpp"
#include "tree/predicate.hpp"

namespace prlab::explain {

// A predicate together with the branch the explained input took.
struct OrientedPredicate {
  tree::NodePredicate predicate;
  bool outcome = true;

  bool holds(const core::Instance& x) const { return predicate.evaluate(x) == outcome; }
  friend bool operator==(const OrientedPredicate&, const OrientedPredicate&) = default;
};

// Server-side bookkeeping only; never serialized to clients.
enum class Provenance { kHonest, kSurrogate };

// Conjunction of oriented predicates that entails `label`.
struct Explanation {
  std::vector<OrientedPredicate> predicates;
  core::Label label = core::Label::kNegative;
  Provenance provenance = Provenance::kHonest;

  std::string describe(const core::FeatureSpace& space) const;
};

// Every predicate holds on x. Throws kConformance if a predicate names a
// feature outside the space.
bool is_apropos(const Explanation& a, const core::Instance& x, const core::FeatureSpace& space);

// The explanation argues for the decision actually returned.
bool is_consequent(const Explanation& a, core::Label y);

bool mentions_discriminative(const Explanation& a, const core::FeatureSpace& space);

}  // namespace prlab::explain
