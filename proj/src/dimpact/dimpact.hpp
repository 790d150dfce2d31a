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

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace prlab::dimpact {

// Disparity ratio below which a decision process is flagged for disparate
// impact (the four-fifths rule). Used only to annotate reports.
inline constexpr double kFourFifthsThreshold = 0.8;

enum class Scenario {
  // Decisions for the two groups are independent events: P(B|A) = P(B).
  kIndependence,
  // A success of the discriminated profile implies success of its
  // non-discriminated twin: P(B|A) = 1.
  kDependence,
};

const char* scenario_name(Scenario s);

struct DisparityParams {
  double alpha = 1.0;  // P(A) / P(B), in (0, 1]
  double p_b = 0.0;    // success probability of the non-discriminated profile
  Scenario scenario = Scenario::kIndependence;
};

void validate(const DisparityParams& params);

// Probability that the pair (x_l, 0), (x_l, 1) is incoherent:
//   P(IP) = P(B) (1 + alpha) - 2 P(A and B),  P(A) = alpha P(B).
double ip_probability(const DisparityParams& params);

struct CurveRow {
  Scenario scenario;
  double alpha;
  double p_b;
  double p_ip;
};

std::vector<CurveRow> emit_curves(std::span<const double> alphas, std::span<const double> p_b_grid,
                                  std::span<const Scenario> scenarios);

// Evenly spaced grid over [0, 1] with `steps` points (steps >= 2).
std::vector<double> unit_grid(std::size_t steps);

void write_curves_csv(std::ostream& out, std::span<const CurveRow> rows);

}  // namespace prlab::dimpact
