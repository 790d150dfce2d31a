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

#include <gtest/gtest.h>

#include <set>

#include "core/classifier.hpp"
#include "core/error.hpp"
#include "core/feature_space.hpp"
#include "support/random_models.hpp"

namespace prlab {
namespace {

using core::FeatureSpace;
using core::Instance;
using core::Label;

FeatureSpace binary_space(int legit, int disc) {
  nlohmann::json fs = nlohmann::json::array();
  for (int i = 0; i < legit; ++i)
    fs.push_back({{"name", "l" + std::to_string(i)}, {"domain", {{"type", "integer"}, {"lo", 0}, {"hi", 1}}}, {"tag", "legit"}});
  for (int i = 0; i < disc; ++i)
    fs.push_back({{"name", "d" + std::to_string(i)}, {"domain", {{"type", "integer"}, {"lo", 0}, {"hi", 1}}}, {"tag", "discriminative"}});
  return FeatureSpace::from_json({{"features", fs}});
}

// Space whose legit part has exactly `n` assignments: one legit feature with n
// values plus one binary discriminative feature.
FeatureSpace legit_cardinality_space(int n) {
  return FeatureSpace::from_json({{"features",
                                   {{{"name", "l"}, {"domain", {{"type", "integer"}, {"lo", 1}, {"hi", n}}}, {"tag", "legit"}},
                                    {{"name", "d"}, {"domain", {{"type", "integer"}, {"lo", 0}, {"hi", 1}}}, {"tag", "discriminative"}}}}});
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

TEST(SplitInstance, BouncerExample) {
  const auto s = testing::bouncer_space();
  const Instance x = testing::bouncer_instance(*s, "yes", "pink", 49);
  const auto parts = core::split_instance(x, *s);
  ASSERT_EQ(parts.legit.size(), 2u);
  ASSERT_EQ(parts.discriminative.size(), 1u);
  EXPECT_EQ(s->feature(0).format_value(parts.legit[0]), "yes");
  EXPECT_EQ(s->feature(1).format_value(parts.legit[1]), "pink");
  EXPECT_EQ(parts.discriminative[0], 49.0);
}

TEST(SplitInstance, NoDiscriminativeFeatures) {
  const auto s = binary_space(2, 0);
  const Instance x{{1, 0}};
  const auto parts = core::split_instance(x, s);
  EXPECT_EQ(parts.legit, (std::vector<double>{1, 0}));
  EXPECT_TRUE(parts.discriminative.empty());
}

TEST(SplitInstance, RoundTripExhaustiveOnThreeBinaryFeatures) {
  // Interleave tags so the layout is not simply legit-then-discriminative.
  const auto s = FeatureSpace::from_json(nlohmann::json::parse(R"({"features": [
    {"name": "a", "domain": {"type": "integer", "lo": 0, "hi": 1}, "tag": "discriminative"},
    {"name": "b", "domain": {"type": "integer", "lo": 0, "hi": 1}, "tag": "legit"},
    {"name": "c", "domain": {"type": "integer", "lo": 0, "hi": 1}, "tag": "discriminative"}]})"));
  int seen = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        const Instance x{{double(a), double(b), double(c)}};
        const auto parts = core::split_instance(x, s);
        EXPECT_EQ(parts.legit, (std::vector<double>{double(b)}));
        EXPECT_EQ(parts.discriminative, (std::vector<double>{double(a), double(c)}));
        EXPECT_EQ(core::merge_instance(parts, s), x);
        ++seen;
      }
  EXPECT_EQ(seen, 8);
}

TEST(SplitInstance, RoundTripOnRandomSpaces) {
  testing::Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = testing::random_space(rng, 0);
    const auto x = testing::random_instance(rng, *s);
    EXPECT_EQ(core::merge_instance(core::split_instance(x, *s), *s), x);
  }
}

TEST(SplitInstance, RejectsNonConformingInstances) {
  const auto s = testing::bouncer_space();
  EXPECT_EQ(code_of([&] { core::split_instance(Instance{{0, 0}}, *s); }), ErrorCode::kConformance);
  EXPECT_EQ(code_of([&] { core::split_instance(Instance{{0, 0, 17}}, *s); }), ErrorCode::kConformance);
  EXPECT_EQ(code_of([&] { core::split_instance(Instance{{2, 0, 30}}, *s); }), ErrorCode::kConformance);
  EXPECT_EQ(code_of([&] { core::split_instance(Instance{{0, 0, 30.5}}, *s); }), ErrorCode::kConformance);
}

TEST(FeatureSpace, RejectsDuplicateNamesAndMissingLegitFeatures) {
  EXPECT_EQ(code_of([] { binary_space(0, 2); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] {
              FeatureSpace::from_json(nlohmann::json::parse(R"({"features": [
      {"name": "a", "domain": {"type": "integer", "lo": 0, "hi": 1}, "tag": "legit"},
      {"name": "a", "domain": {"type": "integer", "lo": 0, "hi": 1}, "tag": "legit"}]})"));
            }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] {
              FeatureSpace::from_json(nlohmann::json::parse(R"({"features": [
      {"name": "a", "domain": {"type": "categorical", "values": []}, "tag": "legit"}]})"));
            }),
            ErrorCode::kInvalidArgument);
}

TEST(FeatureSpace, JsonRoundTrip) {
  const auto s = testing::bouncer_space();
  EXPECT_EQ(FeatureSpace::from_json(s->to_json()), *s);
}

TEST(LegitKey, DistinguishesOnlyLegitParts) {
  const auto s = testing::bouncer_space();
  const auto a = testing::bouncer_instance(*s, "yes", "pink", 49);
  const auto b = testing::bouncer_instance(*s, "yes", "pink", 62);
  const auto c = testing::bouncer_instance(*s, "yes", "none", 49);
  EXPECT_TRUE(core::same_legit_part(a, b, *s));
  EXPECT_FALSE(core::same_legit_part(a, c, *s));
  EXPECT_EQ(core::legit_key(a, *s), core::legit_key(b, *s));
}

TEST(IsLegitimate, ConstantClassifierIsLegitimate) {
  const core::ConstantClassifier zero(Label::kNegative);
  EXPECT_TRUE(core::is_legitimate(zero, binary_space(2, 1)));
  EXPECT_TRUE(core::is_legitimate(zero, *testing::bouncer_space()));
}

TEST(IsLegitimate, BouncerTreeIsNot) {
  const auto s = testing::bouncer_space();
  EXPECT_FALSE(core::is_legitimate(testing::bouncer_tree(s), *s));
}

TEST(IsLegitimate, ExactlyFourOfSixteenOnOneLegitOneDiscriminativeBit) {
  const auto s = binary_space(1, 1);
  const auto all = core::enumerate_all_classifiers(s);
  ASSERT_EQ(all.size(), 16u);
  int legit = 0;
  for (const auto& c : all) legit += core::is_legitimate(c, s);
  EXPECT_EQ(legit, 4);
}

TEST(IsLegitimate, RejectsRealDomains) {
  const auto s = FeatureSpace::from_json(nlohmann::json::parse(R"({"features": [
    {"name": "r", "domain": {"type": "real", "lo": 0, "hi": 1}, "tag": "legit"}]})"));
  EXPECT_EQ(code_of([&] { core::is_legitimate(core::ConstantClassifier(Label::kNegative), s); }),
            ErrorCode::kUnsupportedDomain);
}

TEST(DiracSurrogate, Examples) {
  const auto s = testing::bouncer_space();
  const auto x = testing::bouncer_instance(*s, "yes", "pink", 49);
  const core::DiracSurrogate pos(*s, x, Label::kPositive);
  EXPECT_EQ(pos.classify(x), Label::kPositive);
  EXPECT_EQ(pos.classify(testing::bouncer_instance(*s, "no", "pink", 49)), Label::kNegative);
  EXPECT_EQ(pos.classify(testing::bouncer_instance(*s, "yes", "none", 49)), Label::kNegative);
  const core::DiracSurrogate neg(*s, x, Label::kNegative);
  EXPECT_EQ(neg.classify(testing::bouncer_instance(*s, "yes", "pink", 90)), Label::kNegative);
  EXPECT_EQ(neg.classify(testing::bouncer_instance(*s, "no", "none", 49)), Label::kPositive);
}

TEST(DiracSurrogate, CoherentAndLegitimateOnRandomSpaces) {
  testing::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = testing::random_space(rng);
    const auto x = testing::random_instance(rng, *s);
    for (Label y : {Label::kNegative, Label::kPositive}) {
      const core::DiracSurrogate d(*s, x, y);
      EXPECT_EQ(d.classify(x), y);
      EXPECT_TRUE(core::is_legitimate(d, *s));
    }
  }
}

TEST(EnumerateLegitClassifiers, CountsAndDistinctness) {
  for (int n : {1, 2, 3, 4}) {
    const auto s = legit_cardinality_space(n);
    const auto cs = core::enumerate_legit_classifiers(s);
    ASSERT_EQ(cs.size(), std::size_t{1} << n);
    std::set<std::vector<Label>> tables;
    for (const auto& c : cs) {
      // Truth table read back through classify, not from the stored table.
      std::vector<Label> t;
      for (int v = 1; v <= n; ++v) t.push_back(c.classify(Instance{{double(v), 0}}));
      tables.insert(t);
      EXPECT_TRUE(core::is_legitimate(c, s));
    }
    EXPECT_EQ(tables.size(), cs.size());
  }
}

TEST(EnumerateLegitClassifiers, CapacityGuard) {
  EXPECT_EQ(code_of([] { core::enumerate_legit_classifiers(legit_cardinality_space(21)); }),
            ErrorCode::kCapacity);
  EXPECT_NO_THROW(core::enumerate_legit_classifiers(legit_cardinality_space(12)));
}

TEST(CountPrFunctions, HalfOfLegitClassifiers) {
  const auto s2 = legit_cardinality_space(2);
  const auto r2 = core::count_pr_functions(s2, Instance{{1, 0}}, Label::kPositive);
  EXPECT_EQ(r2.pr_count, 2u);
  EXPECT_EQ(r2.total_count, 4u);
  const auto s3 = legit_cardinality_space(3);
  const auto r3 = core::count_pr_functions(s3, Instance{{2, 1}}, Label::kNegative);
  EXPECT_EQ(r3.pr_count, 4u);
  EXPECT_EQ(r3.total_count, 8u);
}

TEST(CountPrFunctions, ExactHalfForEveryInstanceAndLabel) {
  for (int n : {1, 2, 3, 4}) {
    const auto s = legit_cardinality_space(n);
    const auto cs = core::enumerate_legit_classifiers(s);
    for (int v = 1; v <= n; ++v)
      for (int d = 0; d < 2; ++d) {
        const Instance x{{double(v), double(d)}};
        const auto pos = core::count_pr_functions(s, x, Label::kPositive);
        const auto neg = core::count_pr_functions(s, x, Label::kNegative);
        EXPECT_EQ(2 * pos.pr_count, pos.total_count);
        EXPECT_EQ(neg.pr_count, pos.total_count - pos.pr_count);
        // Independent count straight from the enumerated classifiers.
        std::uint64_t direct = 0;
        for (const auto& c : cs) direct += c.classify(x) == Label::kPositive;
        EXPECT_EQ(direct, pos.pr_count);
      }
  }
}

TEST(ParseInstanceAssignments, RoundTripAndErrors) {
  const auto s = testing::bouncer_space();
  const auto x = core::parse_instance_assignments("Age=33,Socks=none,Disguised=no", *s);
  EXPECT_EQ(core::format_instance(x, *s), "Disguised=no,Socks=none,Age=33");
  EXPECT_EQ(code_of([&] { core::parse_instance_assignments("Disguised=no,Socks=none", *s); }),
            ErrorCode::kConformance);
  EXPECT_EQ(code_of([&] { core::parse_instance_assignments("Disguised=maybe,Socks=none,Age=3", *s); }),
            ErrorCode::kConformance);
}

TEST(CsvDataset, ParsesHeaderAndLabels) {
  const auto s = testing::bouncer_space();
  const auto d = core::parse_csv_dataset("Age,Disguised,Socks,label\n30,yes,pink,1\n70,no,none,0\n", *s);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.labels[0], Label::kPositive);
  EXPECT_EQ(d.instances[1], testing::bouncer_instance(*s, "no", "none", 70));
}

}  // namespace
}  // namespace prlab
