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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace prlab::core {

enum class Label : std::uint8_t { kNegative = 0, kPositive = 1 };

inline int to_int(Label y) { return static_cast<int>(y); }
inline Label flip(Label y) {
  return y == Label::kPositive ? Label::kNegative : Label::kPositive;
}
Label label_from_int(long long v);

enum class FeatureTag { kLegit, kDiscriminative };

struct IntegerRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

struct Categorical {
  std::vector<std::string> values;
};

struct RealInterval {
  double lo = 0.0;
  double hi = 0.0;
};

using Domain = std::variant<IntegerRange, Categorical, RealInterval>;

// Instance values are stored as doubles. Integer features hold integral
// values, categorical features hold the index of the category.
struct FeatureSpec {
  std::string name;
  Domain domain;
  FeatureTag tag = FeatureTag::kLegit;

  bool is_categorical() const { return std::holds_alternative<Categorical>(domain); }
  bool is_discriminative() const { return tag == FeatureTag::kDiscriminative; }
  bool contains(double value) const;
  // Number of distinct values, or nullopt for real intervals.
  std::optional<std::uint64_t> cardinality() const;
  // k-th value in domain order; requires an enumerable domain.
  double value_at(std::uint64_t k) const;
  std::uint64_t ordinal_of(double value) const;
  double lower_bound() const;
  double upper_bound() const;
  // Categorical names are looked up, numeric strings parsed.
  double parse_value(std::string_view text) const;
  std::string format_value(double value) const;
};

struct Instance {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  friend bool operator==(const Instance&, const Instance&) = default;
};

// Legit and discriminative values, each in feature order.
struct SplitInstance {
  std::vector<double> legit;
  std::vector<double> discriminative;
};

class FeatureSpace {
 public:
  explicit FeatureSpace(std::vector<FeatureSpec> features);

  static FeatureSpace from_json(const nlohmann::json& doc);
  static FeatureSpace load(const std::string& path);
  nlohmann::json to_json() const;

  std::size_t size() const { return features_.size(); }
  const FeatureSpec& feature(std::size_t i) const { return features_.at(i); }
  std::span<const FeatureSpec> features() const { return features_; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::size_t require_index(std::string_view name) const;

  std::span<const std::size_t> legit_indices() const { return legit_; }
  std::span<const std::size_t> discriminative_indices() const { return discriminative_; }

  // Throws kConformance on arity or domain mismatch.
  void check(const Instance& x) const;
  bool is_enumerable() const;

  friend bool operator==(const FeatureSpace& a, const FeatureSpace& b) {
    return a.to_json() == b.to_json();
  }

 private:
  std::vector<FeatureSpec> features_;
  std::vector<std::size_t> legit_;
  std::vector<std::size_t> discriminative_;
};

SplitInstance split_instance(const Instance& x, const FeatureSpace& space);
Instance merge_instance(const SplitInstance& parts, const FeatureSpace& space);

// Bitwise-exact key of the legit part, used to group queries.
std::string legit_key(const Instance& x, const FeatureSpace& space);
bool same_legit_part(const Instance& a, const Instance& b, const FeatureSpace& space);

// Mixed-radix enumeration of assignments over a subset of features. The first
// listed feature is the most significant digit.
class AssignmentIndexer {
 public:
  AssignmentIndexer(const FeatureSpace& space, std::vector<std::size_t> features);

  std::uint64_t count() const { return count_; }
  std::span<const std::size_t> features() const { return features_; }
  std::uint64_t index_of(const Instance& x) const;
  // Writes the k-th assignment into the indexed positions of x.
  void assign(std::uint64_t k, Instance& x) const;

 private:
  const FeatureSpace* space_;
  std::vector<std::size_t> features_;
  std::vector<std::uint64_t> radix_;
  std::uint64_t count_ = 1;
};

struct Dataset {
  std::vector<Instance> instances;
  std::vector<Label> labels;

  std::size_t size() const { return instances.size(); }
};

// CSV with a header of feature names; an optional "label" column carries 0/1.
Dataset load_csv_dataset(const std::string& path, const FeatureSpace& space);
Dataset parse_csv_dataset(std::string_view text, const FeatureSpace& space);

// Parses "name=value,name=value" using the space's value syntax.
Instance parse_instance_assignments(std::string_view text, const FeatureSpace& space);
std::string format_instance(const Instance& x, const FeatureSpace& space);

}  // namespace prlab::core
