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

#include "tree/predicate.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace prlab::tree {

using core::FeatureSpace;
using core::Instance;

const char* op_name(const Test& test) {
  if (std::holds_alternative<LessEqual>(test)) return "<=";
  if (std::holds_alternative<InSet>(test)) return "in";
  return "==";
}

bool NodePredicate::evaluate(const Instance& x) const {
  const double v = x[feature];
  if (const auto* le = std::get_if<LessEqual>(&test)) return v <= le->threshold;
  if (const auto* in = std::get_if<InSet>(&test))
    return std::binary_search(in->categories.begin(), in->categories.end(), v);
  return v == std::get<Equals>(test).value;
}

void NodePredicate::validate(const FeatureSpace& space) const {
  if (feature >= space.size())
    fail(ErrorCode::kConformance, "predicate references unknown feature #" + std::to_string(feature));
  const auto& spec = space.feature(feature);
  if (const auto* le = std::get_if<LessEqual>(&test)) {
    if (spec.is_categorical())
      fail(ErrorCode::kConformance, "threshold test on categorical feature " + spec.name);
    if (!std::isfinite(le->threshold) || le->threshold < spec.lower_bound() ||
        le->threshold > spec.upper_bound())
      fail(ErrorCode::kConformance, "threshold outside domain of " + spec.name);
  } else if (const auto* in = std::get_if<InSet>(&test)) {
    if (!spec.is_categorical())
      fail(ErrorCode::kConformance, "membership test on numeric feature " + spec.name);
    if (!std::is_sorted(in->categories.begin(), in->categories.end()))
      fail(ErrorCode::kConformance, "category set must be sorted");
    for (double c : in->categories) {
      if (!spec.contains(c)) fail(ErrorCode::kConformance, "unknown category for " + spec.name);
    }
  } else if (!spec.contains(std::get<Equals>(test).value)) {
    fail(ErrorCode::kConformance, "equality operand outside domain of " + spec.name);
  }
}

std::string NodePredicate::describe(const FeatureSpace& space) const {
  const auto& spec = space.feature(feature);
  if (const auto* le = std::get_if<LessEqual>(&test))
    return spec.name + " <= " + spec.format_value(le->threshold);
  if (const auto* in = std::get_if<InSet>(&test)) {
    std::string s = spec.name + " in {";
    for (std::size_t i = 0; i < in->categories.size(); ++i) {
      if (i) s += ", ";
      s += spec.format_value(in->categories[i]);
    }
    return s + "}";
  }
  return spec.name + " == " + spec.format_value(std::get<Equals>(test).value);
}

namespace {

nlohmann::json value_json(const core::FeatureSpec& spec, double v) {
  if (spec.is_categorical()) return spec.format_value(v);
  if (std::holds_alternative<core::IntegerRange>(spec.domain))
    return static_cast<long long>(v);
  return v;
}

double value_from_json(const core::FeatureSpec& spec, const nlohmann::json& j) {
  if (spec.is_categorical()) {
    if (!j.is_string()) fail(ErrorCode::kConformance, spec.name + " expects a category name");
    return spec.parse_value(j.get<std::string>());
  }
  if (!j.is_number()) fail(ErrorCode::kConformance, spec.name + " expects a number");
  return j.get<double>();
}

}  // namespace

nlohmann::json NodePredicate::to_json(const FeatureSpace& space) const {
  const auto& spec = space.feature(feature);
  nlohmann::json j{{"feature", spec.name}, {"op", op_name(test)}};
  if (const auto* le = std::get_if<LessEqual>(&test)) {
    j["threshold"] = le->threshold;
  } else if (const auto* in = std::get_if<InSet>(&test)) {
    nlohmann::json values = nlohmann::json::array();
    for (double c : in->categories) values.push_back(spec.format_value(c));
    j["values"] = values;
  } else {
    j["value"] = value_json(spec, std::get<Equals>(test).value);
  }
  return j;
}

NodePredicate NodePredicate::from_json(const nlohmann::json& j, const FeatureSpace& space) {
  try {
    NodePredicate p;
    p.feature = space.require_index(j.at("feature").get<std::string>());
    const auto& spec = space.feature(p.feature);
    const std::string op = j.at("op").get<std::string>();
    if (op == "<=") {
      p.test = LessEqual{j.at("threshold").get<double>()};
    } else if (op == "in") {
      InSet in;
      for (const auto& v : j.at("values")) in.categories.push_back(value_from_json(spec, v));
      std::sort(in.categories.begin(), in.categories.end());
      in.categories.erase(std::unique(in.categories.begin(), in.categories.end()),
                          in.categories.end());
      p.test = std::move(in);
    } else if (op == "==") {
      p.test = Equals{value_from_json(spec, j.at("value"))};
    } else {
      fail(ErrorCode::kParse, "unknown predicate op '" + op + "'");
    }
    p.validate(space);
    return p;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed predicate: ") + e.what());
  }
}

}  // namespace prlab::tree
