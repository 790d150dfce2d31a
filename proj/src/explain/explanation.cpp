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

#include "explain/explanation.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace prlab::explain {

std::string Explanation::describe(const core::FeatureSpace& space) const {
  std::string s = "[";
  for (std::size_t i = 0; i < predicates.size(); ++i) {
    if (i) s += ", ";
    const auto& p = predicates[i];
    s += p.outcome ? "" : "not ";
    s += p.predicate.describe(space);
  }
  return s + "] => " + std::to_string(core::to_int(label));
}

bool is_apropos(const Explanation& a, const core::Instance& x, const core::FeatureSpace& space) {
  space.check(x);
  for (const auto& p : a.predicates) {
    try {
      p.predicate.validate(space);
    } catch (const Error& e) {
      fail(ErrorCode::kConformance, std::string("malformed explanation: ") + e.what());
    }
  }
  return std::all_of(a.predicates.begin(), a.predicates.end(),
                     [&](const OrientedPredicate& p) { return p.holds(x); });
}

bool is_consequent(const Explanation& a, core::Label y) { return a.label == y; }

bool mentions_discriminative(const Explanation& a, const core::FeatureSpace& space) {
  return std::any_of(a.predicates.begin(), a.predicates.end(), [&](const OrientedPredicate& p) {
    return p.predicate.feature < space.size() &&
           space.feature(p.predicate.feature).is_discriminative();
  });
}

}  // namespace prlab::explain
