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
#include <string>

#include "core/feature_space.hpp"
#include "explain/explanation.hpp"
#include "json.hpp"

namespace prlab::service {

struct ClassifyRequest {
  std::string client_id;
  core::Instance instance;
};

struct ClassifyReply {
  core::Label decision = core::Label::kNegative;
  explain::Explanation explanation;
  std::uint64_t query_id = 0;
};

// Bodies are one JSON object on one line, keys sorted, terminated by '\n'.
// Categorical values travel as names, numbers as numbers.
std::string encode_request(const std::string& client_id, const core::Instance& x,
                           const core::FeatureSpace& space);
// Throws kParse for malformed JSON and kConformance for features that do not
// fit the space (missing, unknown, out of domain).
ClassifyRequest decode_request(const std::string& body, const core::FeatureSpace& space);

// Provenance is server-side state and is not transmitted.
std::string encode_reply(const ClassifyReply& reply, const core::FeatureSpace& space);
ClassifyReply decode_reply(const std::string& body, const core::FeatureSpace& space);

nlohmann::json explanation_to_json(const explain::Explanation& a, const core::FeatureSpace& space);
explain::Explanation explanation_from_json(const nlohmann::json& j, const core::FeatureSpace& space);

std::string to_line(const nlohmann::json& j);

}  // namespace prlab::service
