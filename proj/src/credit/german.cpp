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

#include "credit/german.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace prlab::credit {

std::vector<CreditRecord> load_german_numeric(std::istream& in) {
  std::vector<CreditRecord> records;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::istringstream tokens(line);
    std::vector<long long> values;
    std::string tok;
    while (tokens >> tok) {
      long long v = 0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size())
        fail(ErrorCode::kParse, "row " + std::to_string(row) + ": non-integer token '" + tok + "'");
      values.push_back(v);
    }
    if (values.empty()) continue;
    if (values.size() != kGermanFeatureCount + 1) {
      fail(ErrorCode::kParse, "row " + std::to_string(row) + ": expected " +
                                  std::to_string(kGermanFeatureCount + 1) + " columns, got " +
                                  std::to_string(values.size()));
    }
    CreditRecord r;
    for (std::size_t i = 0; i < kGermanFeatureCount; ++i) r.features[i] = static_cast<double>(values[i]);
    const long long cls = values.back();
    if (cls != 1 && cls != 2)
      fail(ErrorCode::kParse, "row " + std::to_string(row) + ": class must be 1 or 2");
    r.label = cls == 1 ? core::Label::kPositive : core::Label::kNegative;
    records.push_back(r);
  }
  if (records.empty()) fail(ErrorCode::kParse, "empty credit dataset");
  return records;
}

std::vector<CreditRecord> load_german_numeric_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  return load_german_numeric(in);
}

namespace {

std::vector<std::string> column_names(const nlohmann::json& config) {
  std::vector<std::string> names;
  if (config.contains("features")) {
    for (const auto& f : config.at("features")) names.push_back(f.at("name").get<std::string>());
  }
  return names;
}

}  // namespace

std::map<std::string, std::size_t> discriminative_feature_map(const nlohmann::json& config) {
  if (!config.is_object() || !config.contains("discriminative_attributes"))
    fail(ErrorCode::kInvalidArgument, "config lacks discriminative_attributes");
  const auto& table = config.at("discriminative_attributes");
  if (!table.is_object() || table.empty())
    fail(ErrorCode::kInvalidArgument, "discriminative_attributes must name the four attributes");
  const auto names = column_names(config);
  std::map<std::string, std::size_t> out;
  for (const auto& attr : kDiscriminativeAttributes) {
    if (!table.contains(attr)) fail(ErrorCode::kInvalidArgument, "unresolved attribute " + attr);
    const auto& v = table.at(attr);
    std::size_t column = 0;
    if (v.is_number_unsigned()) {
      column = v.get<std::size_t>();
    } else if (v.is_string()) {
      const auto it = std::find(names.begin(), names.end(), v.get<std::string>());
      if (it == names.end())
        fail(ErrorCode::kInvalidArgument, "unresolved attribute " + attr + " -> " + v.get<std::string>());
      column = static_cast<std::size_t>(it - names.begin());
    } else {
      fail(ErrorCode::kInvalidArgument, "attribute " + attr + " must map to an index or name");
    }
    if (column >= kGermanFeatureCount)
      fail(ErrorCode::kInvalidArgument, "attribute " + attr + " maps outside the 24 columns");
    out[attr] = column;
  }
  for (const auto& [k, v] : table.items()) {
    if (!out.count(k)) fail(ErrorCode::kInvalidArgument, "unexpected attribute " + k);
  }
  return out;
}

core::FeatureSpace german_feature_space(const nlohmann::json& config) {
  const auto disc = discriminative_feature_map(config);
  try {
    nlohmann::json space = {{"features", config.at("features")}};
    if (space["features"].size() != kGermanFeatureCount)
      fail(ErrorCode::kInvalidArgument, "config must describe 24 feature columns");
    for (auto& f : space["features"]) f["tag"] = "legit";
    for (const auto& [attr, col] : disc) space["features"][col]["tag"] = "discriminative";
    return core::FeatureSpace::from_json(space);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed credit config: ") + e.what());
  }
}

nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, path + ": " + e.what());
  }
}

core::Instance to_instance(const CreditRecord& r) {
  return core::Instance{{r.features.begin(), r.features.end()}};
}

core::Dataset to_dataset(const std::vector<CreditRecord>& records) {
  core::Dataset d;
  for (const auto& r : records) {
    d.instances.push_back(to_instance(r));
    d.labels.push_back(r.label);
  }
  return d;
}

}  // namespace prlab::credit
