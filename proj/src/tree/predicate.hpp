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

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "core/feature_space.hpp"
#include "json.hpp"

namespace prlab::tree {

struct LessEqual {
  double threshold = 0.0;
  friend bool operator==(const LessEqual&, const LessEqual&) = default;
};

// Categorical membership; categories are stored as sorted ordinals.
struct InSet {
  std::vector<double> categories;
  friend bool operator==(const InSet&, const InSet&) = default;
};

// Exact equality. Only produced by point-surrogate explanations.
struct Equals {
  double value = 0.0;
  friend bool operator==(const Equals&, const Equals&) = default;
};

using Test = std::variant<LessEqual, InSet, Equals>;

// Single-feature test at an internal node.
struct NodePredicate {
  std::size_t feature = 0;
  Test test;

  bool evaluate(const core::Instance& x) const;
  // Throws kConformance if the feature or its operands do not fit the space.
  void validate(const core::FeatureSpace& space) const;
  std::string describe(const core::FeatureSpace& space) const;

  nlohmann::json to_json(const core::FeatureSpace& space) const;
  // Reads {"feature", "op", ...} where op is "<=", "in" or "==".
  static NodePredicate from_json(const nlohmann::json& j, const core::FeatureSpace& space);

  friend bool operator==(const NodePredicate&, const NodePredicate&) = default;
};

const char* op_name(const Test& test);

}  // namespace prlab::tree
