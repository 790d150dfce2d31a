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

#include <sstream>

#include "core/error.hpp"
#include "dimpact/dimpact.hpp"
#include "support/dimpact_oracle.hpp"

namespace prlab {
namespace {

using dimpact::DisparityParams;
using dimpact::Scenario;

TEST(IpProbability, Examples) {
  for (double pb : {0.0, 0.3, 0.5, 1.0})
    EXPECT_EQ(dimpact::ip_probability({1.0, pb, Scenario::kDependence}), 0.0);
  EXPECT_DOUBLE_EQ(dimpact::ip_probability({1.0, 0.5, Scenario::kIndependence}), 0.5);
  EXPECT_NEAR(dimpact::ip_probability({0.1, 0.5, Scenario::kDependence}), 0.45, 1e-15);
}

TEST(IpProbability, IndependenceMatchesMonteCarloAtHalf) {
  const DisparityParams p{1.0, 0.5, Scenario::kIndependence};
  EXPECT_NEAR(testing::monte_carlo_ip(p, 200000, 1), dimpact::ip_probability(p), 6e-3);
}

TEST(IpProbability, MatchesMonteCarloOnCoarseGrid) {
  std::uint64_t seed = 100;
  for (double alpha : {0.2, 0.6, 1.0})
    for (double pb : {0.1, 0.5, 0.9})
      for (Scenario sc : {Scenario::kIndependence, Scenario::kDependence}) {
        const DisparityParams p{alpha, pb, sc};
        EXPECT_NEAR(testing::monte_carlo_ip(p, 200000, seed++), dimpact::ip_probability(p), 6e-3)
            << alpha << ' ' << pb << ' ' << dimpact::scenario_name(sc);
      }
}

TEST(IpProbability, RangeErrors) {
  EXPECT_THROW(dimpact::ip_probability({0.0, 0.5, Scenario::kIndependence}), Error);
  EXPECT_THROW(dimpact::ip_probability({1.2, 0.5, Scenario::kIndependence}), Error);
  EXPECT_THROW(dimpact::ip_probability({0.5, -0.1, Scenario::kDependence}), Error);
  EXPECT_THROW(dimpact::ip_probability({0.5, 1.1, Scenario::kDependence}), Error);
}

TEST(IpProbability, DependenceDecreasesInAlpha) {
  for (double pb : {0.2, 0.7}) {
    double prev = 2.0;
    for (int k = 1; k <= 10; ++k) {
      const double v = dimpact::ip_probability({0.1 * k, pb, Scenario::kDependence});
      EXPECT_LT(v, prev);
      prev = v;
    }
  }
}

TEST(EmitCurves, GridProperties) {
  const auto grid = dimpact::unit_grid(11);
  ASSERT_EQ(grid.size(), 11u);
  EXPECT_EQ(grid.front(), 0.0);
  EXPECT_EQ(grid.back(), 1.0);
  const std::vector<double> alphas{0.25, 0.5, 0.8, 1.0};
  const std::vector<Scenario> both{Scenario::kIndependence, Scenario::kDependence};
  const auto rows = dimpact::emit_curves(alphas, grid, both);
  EXPECT_EQ(rows.size(), alphas.size() * grid.size() * 2);
  for (const auto& r : rows) {
    EXPECT_GE(r.p_ip, 0.0);
    EXPECT_LE(r.p_ip, 1.0);
    if (r.p_b == 0.0) EXPECT_EQ(r.p_ip, 0.0);
  }
  // Dependence rows: constant finite-difference slope 1 - alpha.
  for (double a : alphas) {
    std::vector<double> ys;
    for (const auto& r : rows)
      if (r.scenario == Scenario::kDependence && r.alpha == a) ys.push_back(r.p_ip);
    for (std::size_t i = 1; i < ys.size(); ++i)
      EXPECT_NEAR((ys[i] - ys[i - 1]) / (grid[i] - grid[i - 1]), 1.0 - a, 1e-9);
  }
  // Independence at alpha 1 is 2p(1-p): symmetric, maximum 0.5 at p = 0.5.
  std::vector<double> ind;
  for (const auto& r : rows)
    if (r.scenario == Scenario::kIndependence && r.alpha == 1.0) ind.push_back(r.p_ip);
  for (std::size_t i = 0; i < ind.size(); ++i) {
    EXPECT_NEAR(ind[i], ind[ind.size() - 1 - i], 1e-12);
    EXPECT_NEAR(ind[i], 2 * grid[i] * (1 - grid[i]), 1e-12);
  }
  EXPECT_DOUBLE_EQ(ind[5], 0.5);
}

TEST(EmitCurves, CsvHeaderAndRow) {
  const std::vector<double> alphas{0.5};
  const std::vector<double> grid{0.5};
  const std::vector<Scenario> dep{Scenario::kDependence};
  std::ostringstream out;
  dimpact::write_curves_csv(out, dimpact::emit_curves(alphas, grid, dep));
  EXPECT_EQ(out.str(), "scenario,alpha,p_b,p_ip\ndependence,0.500000,0.500000,0.250000000\n");
}

TEST(FourFifths, Constant) { EXPECT_EQ(dimpact::kFourFifthsThreshold, 0.8); }

}  // namespace
}  // namespace prlab
