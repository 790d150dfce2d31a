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

#include "core/feature_space.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "core/error.hpp"

namespace prlab {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kConformance: return "conformance error";
    case ErrorCode::kUnsupportedDomain: return "unsupported domain";
    case ErrorCode::kCapacity: return "capacity error";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kNetwork: return "network error";
    case ErrorCode::kProtocol: return "protocol violation";
    case ErrorCode::kRateLimited: return "rate limited";
    case ErrorCode::kDegenerate: return "degenerate input";
  }
  return "error";
}

}  // namespace prlab

namespace prlab::core {

namespace {

bool is_integral(double v) { return std::isfinite(v) && std::floor(v) == v; }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Domain domain_from_json(const nlohmann::json& d, const std::string& name) {
  const std::string type = d.at("type").get<std::string>();
  if (type == "integer") {
    IntegerRange r{d.at("lo").get<std::int64_t>(), d.at("hi").get<std::int64_t>()};
    if (r.lo > r.hi) fail(ErrorCode::kInvalidArgument, "empty integer domain for " + name);
    return r;
  }
  if (type == "categorical") {
    Categorical c{d.at("values").get<std::vector<std::string>>()};
    if (c.values.empty()) fail(ErrorCode::kInvalidArgument, "empty categorical domain for " + name);
    std::set<std::string> uniq(c.values.begin(), c.values.end());
    if (uniq.size() != c.values.size())
      fail(ErrorCode::kInvalidArgument, "duplicate category in " + name);
    return c;
  }
  if (type == "real") {
    RealInterval r{d.at("lo").get<double>(), d.at("hi").get<double>()};
    if (!(r.lo <= r.hi)) fail(ErrorCode::kInvalidArgument, "empty real domain for " + name);
    return r;
  }
  fail(ErrorCode::kInvalidArgument, "unknown domain type '" + type + "' for " + name);
}

nlohmann::json domain_to_json(const Domain& d) {
  return std::visit(
      [](const auto& dom) -> nlohmann::json {
        using T = std::decay_t<decltype(dom)>;
        if constexpr (std::is_same_v<T, IntegerRange>) {
          return {{"type", "integer"}, {"lo", dom.lo}, {"hi", dom.hi}};
        } else if constexpr (std::is_same_v<T, Categorical>) {
          return {{"type", "categorical"}, {"values", dom.values}};
        } else {
          return {{"type", "real"}, {"lo", dom.lo}, {"hi", dom.hi}};
        }
      },
      d);
}

}  // namespace

Label label_from_int(long long v) {
  if (v == 0) return Label::kNegative;
  if (v == 1) return Label::kPositive;
  fail(ErrorCode::kConformance, "label must be 0 or 1, got " + std::to_string(v));
}

bool FeatureSpec::contains(double value) const {
  return std::visit(
      [value](const auto& dom) {
        using T = std::decay_t<decltype(dom)>;
        if constexpr (std::is_same_v<T, IntegerRange>) {
          return is_integral(value) && value >= static_cast<double>(dom.lo) &&
                 value <= static_cast<double>(dom.hi);
        } else if constexpr (std::is_same_v<T, Categorical>) {
          return is_integral(value) && value >= 0 &&
                 value < static_cast<double>(dom.values.size());
        } else {
          return std::isfinite(value) && value >= dom.lo && value <= dom.hi;
        }
      },
      domain);
}

std::optional<std::uint64_t> FeatureSpec::cardinality() const {
  if (const auto* r = std::get_if<IntegerRange>(&domain))
    return static_cast<std::uint64_t>(r->hi - r->lo) + 1;
  if (const auto* c = std::get_if<Categorical>(&domain)) return c->values.size();
  return std::nullopt;
}

double FeatureSpec::value_at(std::uint64_t k) const {
  if (const auto* r = std::get_if<IntegerRange>(&domain))
    return static_cast<double>(r->lo + static_cast<std::int64_t>(k));
  if (std::holds_alternative<Categorical>(domain)) return static_cast<double>(k);
  fail(ErrorCode::kUnsupportedDomain, "feature " + name + " has a real-valued domain");
}

std::uint64_t FeatureSpec::ordinal_of(double value) const {
  if (const auto* r = std::get_if<IntegerRange>(&domain))
    return static_cast<std::uint64_t>(static_cast<std::int64_t>(value) - r->lo);
  if (std::holds_alternative<Categorical>(domain)) return static_cast<std::uint64_t>(value);
  fail(ErrorCode::kUnsupportedDomain, "feature " + name + " has a real-valued domain");
}

double FeatureSpec::lower_bound() const {
  if (const auto* r = std::get_if<IntegerRange>(&domain)) return static_cast<double>(r->lo);
  if (std::holds_alternative<Categorical>(domain)) return 0.0;
  return std::get<RealInterval>(domain).lo;
}

double FeatureSpec::upper_bound() const {
  if (const auto* r = std::get_if<IntegerRange>(&domain)) return static_cast<double>(r->hi);
  if (const auto* c = std::get_if<Categorical>(&domain))
    return static_cast<double>(c->values.size() - 1);
  return std::get<RealInterval>(domain).hi;
}

double FeatureSpec::parse_value(std::string_view text) const {
  const std::string t = trim(text);
  if (const auto* c = std::get_if<Categorical>(&domain)) {
    const auto it = std::find(c->values.begin(), c->values.end(), t);
    if (it == c->values.end())
      fail(ErrorCode::kConformance, "'" + t + "' is not a category of " + name);
    return static_cast<double>(it - c->values.begin());
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    fail(ErrorCode::kConformance, "'" + t + "' is not a number for " + name);
  if (!contains(v)) fail(ErrorCode::kConformance, "value " + t + " outside domain of " + name);
  return v;
}

std::string FeatureSpec::format_value(double value) const {
  if (const auto* c = std::get_if<Categorical>(&domain)) {
    if (contains(value)) return c->values[static_cast<std::size_t>(value)];
  }
  if (is_integral(value) && std::abs(value) < 1e15) {
    return std::to_string(static_cast<long long>(value));
  }
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << value;
  return os.str();
}

FeatureSpace::FeatureSpace(std::vector<FeatureSpec> features) : features_(std::move(features)) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const auto& f = features_[i];
    if (f.name.empty()) fail(ErrorCode::kInvalidArgument, "feature name must not be empty");
    if (!names.insert(f.name).second)
      fail(ErrorCode::kInvalidArgument, "duplicate feature name " + f.name);
    (f.is_discriminative() ? discriminative_ : legit_).push_back(i);
  }
  if (legit_.empty())
    fail(ErrorCode::kInvalidArgument, "feature space needs at least one legit feature");
}

FeatureSpace FeatureSpace::from_json(const nlohmann::json& doc) {
  try {
    std::vector<FeatureSpec> specs;
    for (const auto& f : doc.at("features")) {
      FeatureSpec spec;
      spec.name = f.at("name").get<std::string>();
      spec.domain = domain_from_json(f.at("domain"), spec.name);
      const std::string tag = f.value("tag", std::string("legit"));
      if (tag == "legit") {
        spec.tag = FeatureTag::kLegit;
      } else if (tag == "discriminative") {
        spec.tag = FeatureTag::kDiscriminative;
      } else {
        fail(ErrorCode::kInvalidArgument, "unknown tag '" + tag + "' for " + spec.name);
      }
      specs.push_back(std::move(spec));
    }
    return FeatureSpace(std::move(specs));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed feature space: ") + e.what());
  }
}

FeatureSpace FeatureSpace::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, path + ": " + e.what());
  }
  return from_json(doc);
}

nlohmann::json FeatureSpace::to_json() const {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : features_) {
    features.push_back({{"name", f.name},
                        {"domain", domain_to_json(f.domain)},
                        {"tag", f.is_discriminative() ? "discriminative" : "legit"}});
  }
  return {{"features", features}};
}

std::optional<std::size_t> FeatureSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t FeatureSpace::require_index(std::string_view name) const {
  const auto i = index_of(name);
  if (!i) fail(ErrorCode::kConformance, "unknown feature " + std::string(name));
  return *i;
}

void FeatureSpace::check(const Instance& x) const {
  if (x.size() != features_.size()) {
    fail(ErrorCode::kConformance, "instance has " + std::to_string(x.size()) +
                                      " values, space has " + std::to_string(features_.size()));
  }
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (!features_[i].contains(x[i])) {
      fail(ErrorCode::kConformance,
           "value " + features_[i].format_value(x[i]) + " outside domain of " + features_[i].name);
    }
  }
}

bool FeatureSpace::is_enumerable() const {
  return std::all_of(features_.begin(), features_.end(),
                     [](const FeatureSpec& f) { return f.cardinality().has_value(); });
}

SplitInstance split_instance(const Instance& x, const FeatureSpace& space) {
  space.check(x);
  SplitInstance parts;
  for (std::size_t i : space.legit_indices()) parts.legit.push_back(x[i]);
  for (std::size_t i : space.discriminative_indices()) parts.discriminative.push_back(x[i]);
  return parts;
}

Instance merge_instance(const SplitInstance& parts, const FeatureSpace& space) {
  const auto legit = space.legit_indices();
  const auto disc = space.discriminative_indices();
  if (parts.legit.size() != legit.size() || parts.discriminative.size() != disc.size())
    fail(ErrorCode::kConformance, "split parts do not match the space");
  Instance x{std::vector<double>(space.size())};
  for (std::size_t k = 0; k < legit.size(); ++k) x[legit[k]] = parts.legit[k];
  for (std::size_t k = 0; k < disc.size(); ++k) x[disc[k]] = parts.discriminative[k];
  space.check(x);
  return x;
}

std::string legit_key(const Instance& x, const FeatureSpace& space) {
  std::string key;
  key.reserve(space.legit_indices().size() * sizeof(std::uint64_t));
  for (std::size_t i : space.legit_indices()) {
    const auto bits = std::bit_cast<std::uint64_t>(x[i]);
    for (int b = 7; b >= 0; --b) key.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
  }
  return key;
}

bool same_legit_part(const Instance& a, const Instance& b, const FeatureSpace& space) {
  for (std::size_t i : space.legit_indices()) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

AssignmentIndexer::AssignmentIndexer(const FeatureSpace& space, std::vector<std::size_t> features)
    : space_(&space), features_(std::move(features)) {
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 62;
  for (std::size_t i : features_) {
    const auto card = space.feature(i).cardinality();
    if (!card) {
      fail(ErrorCode::kUnsupportedDomain,
           "feature " + space.feature(i).name + " is real-valued and cannot be enumerated");
    }
    if (count_ > kLimit / *card) fail(ErrorCode::kCapacity, "assignment space overflows");
    radix_.push_back(*card);
    count_ *= *card;
  }
}

std::uint64_t AssignmentIndexer::index_of(const Instance& x) const {
  std::uint64_t k = 0;
  for (std::size_t j = 0; j < features_.size(); ++j) {
    k = k * radix_[j] + space_->feature(features_[j]).ordinal_of(x[features_[j]]);
  }
  return k;
}

void AssignmentIndexer::assign(std::uint64_t k, Instance& x) const {
  for (std::size_t j = features_.size(); j-- > 0;) {
    x[features_[j]] = space_->feature(features_[j]).value_at(k % radix_[j]);
    k /= radix_[j];
  }
}

Dataset parse_csv_dataset(std::string_view text, const FeatureSpace& space) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    if (!trim(line).empty()) header = split_on(line, ',');
  }
  if (header.empty()) fail(ErrorCode::kParse, "dataset has no header");
  std::vector<std::optional<std::size_t>> column_feature;
  std::optional<std::size_t> label_column;
  std::vector<bool> seen(space.size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "label") {
      label_column = c;
      column_feature.emplace_back();
      continue;
    }
    const auto f = space.index_of(header[c]);
    if (!f) fail(ErrorCode::kConformance, "dataset column '" + header[c] + "' not in the space");
    seen[*f] = true;
    column_feature.push_back(f);
  }
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!seen[i]) fail(ErrorCode::kConformance, "dataset lacks feature " + space.feature(i).name);
  }
  Dataset data;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_on(line, ',');
    if (cells.size() != header.size())
      fail(ErrorCode::kParse, "row " + std::to_string(row) + " has wrong column count");
    Instance x{std::vector<double>(space.size())};
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (column_feature[c]) {
        x[*column_feature[c]] = space.feature(*column_feature[c]).parse_value(cells[c]);
      } else if (cells[c] == "0" || cells[c] == "1") {
        data.labels.push_back(cells[c] == "1" ? Label::kPositive : Label::kNegative);
      } else {
        fail(ErrorCode::kParse, "row " + std::to_string(row) + ": label must be 0 or 1");
      }
    }
    data.instances.push_back(std::move(x));
  }
  if (label_column && data.labels.size() != data.instances.size())
    fail(ErrorCode::kParse, "label column incomplete");
  return data;
}

Dataset load_csv_dataset(const std::string& path, const FeatureSpace& space) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv_dataset(ss.str(), space);
}

Instance parse_instance_assignments(std::string_view text, const FeatureSpace& space) {
  Instance x{std::vector<double>(space.size())};
  std::vector<bool> set(space.size(), false);
  for (const auto& item : split_on(text, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorCode::kParse, "expected name=value, got '" + item + "'");
    const std::size_t i = space.require_index(trim(item.substr(0, eq)));
    x[i] = space.feature(i).parse_value(item.substr(eq + 1));
    set[i] = true;
  }
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!set[i]) fail(ErrorCode::kConformance, "missing value for " + space.feature(i).name);
  }
  return x;
}

std::string format_instance(const Instance& x, const FeatureSpace& space) {
  std::string out;
  for (std::size_t i = 0; i < space.size() && i < x.size(); ++i) {
    if (i) out += ',';
    out += space.feature(i).name + '=' + space.feature(i).format_value(x[i]);
  }
  return out;
}

}  // namespace prlab::core
