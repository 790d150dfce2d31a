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
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "core/feature_space.hpp"
#include "json.hpp"

namespace prlab::credit {

inline constexpr std::size_t kGermanFeatureCount = 24;

struct CreditRecord {
  std::array<double, kGermanFeatureCount> features{};
  core::Label label = core::Label::kNegative;
};

// Whitespace-separated integer rows with 24 features and a class in {1, 2}.
// Class 1 (good risk) maps to label 1, class 2 to label 0. Values are returned
// unscaled; scaling is fitted on the training split by the trainer.
std::vector<CreditRecord> load_german_numeric(std::istream& in);
std::vector<CreditRecord> load_german_numeric_file(const std::string& path);

// The four attributes that must be treated as discriminative.
inline const std::array<std::string, 4> kDiscriminativeAttributes = {"employment", "sex_status",
                                                                      "age", "foreigner"};

// Resolves "discriminative_attributes" (attribute -> column index or feature
// name) to column indices. Every entry of kDiscriminativeAttributes is required.
std::map<std::string, std::size_t> discriminative_feature_map(const nlohmann::json& config);

// Feature space of the numeric encoding: "features" gives name and domain of
// each of the 24 columns, tags come from the discriminative map.
core::FeatureSpace german_feature_space(const nlohmann::json& config);

nlohmann::json load_config(const std::string& path);

core::Instance to_instance(const CreditRecord& r);
core::Dataset to_dataset(const std::vector<CreditRecord>& records);

}  // namespace prlab::credit
