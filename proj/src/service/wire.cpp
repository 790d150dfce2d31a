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

#include "service/wire.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace prlab::service {

using core::FeatureSpace;
using core::FeatureSpec;

namespace {

nlohmann::json value_json(const FeatureSpec& spec, double v) {
  if (spec.is_categorical()) return spec.format_value(v);
  if (std::holds_alternative<core::IntegerRange>(spec.domain)) return static_cast<long long>(v);
  return v;
}

double value_from_json(const FeatureSpec& spec, const nlohmann::json& j) {
  if (spec.is_categorical()) {
    if (!j.is_string()) fail(ErrorCode::kConformance, spec.name + " expects a category name");
    return spec.parse_value(j.get<std::string>());
  }
  if (!j.is_number()) fail(ErrorCode::kConformance, spec.name + " expects a number");
  const double v = j.get<double>();
  if (!spec.contains(v)) fail(ErrorCode::kConformance, spec.name + " value outside its domain");
  return v;
}

nlohmann::json parse_body(const std::string& body) {
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed body: ") + e.what());
  }
}

}  // namespace

std::string to_line(const nlohmann::json& j) { return j.dump() + "\n"; }

std::string encode_request(const std::string& client_id, const core::Instance& x,
                           const FeatureSpace& space) {
  space.check(x);
  nlohmann::json features = nlohmann::json::object();
  for (std::size_t i = 0; i < space.size(); ++i)
    features[space.feature(i).name] = value_json(space.feature(i), x[i]);
  return to_line({{"client_id", client_id}, {"features", features}});
}

ClassifyRequest decode_request(const std::string& body, const FeatureSpace& space) {
  const nlohmann::json j = parse_body(body);
  if (!j.is_object()) fail(ErrorCode::kParse, "request must be an object");
  if (!j.contains("client_id") || !j["client_id"].is_string())
    fail(ErrorCode::kParse, "request lacks a string client_id");
  if (!j.contains("features") || !j["features"].is_object())
    fail(ErrorCode::kParse, "request lacks a features object");
  ClassifyRequest req;
  req.client_id = j["client_id"].get<std::string>();
  const auto& f = j["features"];
  if (f.size() != space.size())
    fail(ErrorCode::kConformance, "expected " + std::to_string(space.size()) + " features");
  req.instance.values.resize(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& spec = space.feature(i);
    if (!f.contains(spec.name)) fail(ErrorCode::kConformance, "missing feature " + spec.name);
    req.instance.values[i] = value_from_json(spec, f[spec.name]);
  }
  return req;
}

nlohmann::json explanation_to_json(const explain::Explanation& a, const FeatureSpace& space) {
  nlohmann::json preds = nlohmann::json::array();
  for (const auto& op : a.predicates) {
    const auto& p = op.predicate;
    const auto& spec = space.feature(p.feature);
    nlohmann::json e{{"feature", spec.name}, {"op", tree::op_name(p.test)}, {"branch", op.outcome}};
    if (const auto* le = std::get_if<tree::LessEqual>(&p.test)) {
      e["value"] = le->threshold;
    } else if (const auto* in = std::get_if<tree::InSet>(&p.test)) {
      nlohmann::json names = nlohmann::json::array();
      for (double c : in->categories) names.push_back(spec.format_value(c));
      e["value"] = names;
    } else {
      e["value"] = value_json(spec, std::get<tree::Equals>(p.test).value);
    }
    preds.push_back(std::move(e));
  }
  return {{"predicates", preds}, {"label", core::to_int(a.label)}};
}

explain::Explanation explanation_from_json(const nlohmann::json& j, const FeatureSpace& space) {
  try {
    explain::Explanation a;
    a.label = core::label_from_int(j.at("label").get<int>());
    for (const auto& e : j.at("predicates")) {
      tree::NodePredicate p;
      p.feature = space.require_index(e.at("feature").get<std::string>());
      const auto& spec = space.feature(p.feature);
      const std::string op = e.at("op").get<std::string>();
      const auto& v = e.at("value");
      if (op == "<=") {
        p.test = tree::LessEqual{v.get<double>()};
      } else if (op == "in") {
        tree::InSet in;
        for (const auto& c : v) in.categories.push_back(value_from_json(spec, c));
        std::sort(in.categories.begin(), in.categories.end());
        p.test = std::move(in);
      } else if (op == "==") {
        p.test = tree::Equals{value_from_json(spec, v)};
      } else {
        fail(ErrorCode::kProtocol, "unknown predicate op '" + op + "'");
      }
      p.validate(space);
      a.predicates.push_back({std::move(p), e.at("branch").get<bool>()});
    }
    return a;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kProtocol, std::string("malformed explanation: ") + e.what());
  }
}

std::string encode_reply(const ClassifyReply& reply, const FeatureSpace& space) {
  return to_line({{"decision", core::to_int(reply.decision)},
                  {"explanation", explanation_to_json(reply.explanation, space)},
                  {"query_id", reply.query_id}});
}

ClassifyReply decode_reply(const std::string& body, const FeatureSpace& space) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kProtocol, std::string("malformed reply: ") + e.what());
  }
  try {
    ClassifyReply r;
    r.decision = core::label_from_int(j.at("decision").get<int>());
    r.explanation = explanation_from_json(j.at("explanation"), space);
    r.query_id = j.at("query_id").get<std::uint64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kProtocol, std::string("malformed reply: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kProtocol) throw;
    fail(ErrorCode::kProtocol, e.what());
  }
}

}  // namespace prlab::service
