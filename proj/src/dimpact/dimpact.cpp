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

#include "dimpact/dimpact.hpp"

#include <cstdio>

#include "core/error.hpp"

namespace prlab::dimpact {

const char* scenario_name(Scenario s) {
  return s == Scenario::kIndependence ? "independence" : "dependence";
}

void validate(const DisparityParams& params) {
  if (!(params.alpha > 0.0 && params.alpha <= 1.0))
    fail(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1]");
  if (!(params.p_b >= 0.0 && params.p_b <= 1.0))
    fail(ErrorCode::kInvalidArgument, "P(B) must lie in [0, 1]");
}

double ip_probability(const DisparityParams& params) {
  validate(params);
  const double a = params.alpha;
  const double p = params.p_b;
  switch (params.scenario) {
    case Scenario::kIndependence:
      return p * (1.0 + a) - 2.0 * a * p * p;
    case Scenario::kDependence:
      return p * (1.0 - a);
  }
  return 0.0;
}

std::vector<CurveRow> emit_curves(std::span<const double> alphas, std::span<const double> p_b_grid,
                                  std::span<const Scenario> scenarios) {
  std::vector<CurveRow> rows;
  rows.reserve(alphas.size() * p_b_grid.size() * scenarios.size());
  for (Scenario s : scenarios) {
    for (double a : alphas) {
      for (double p : p_b_grid) rows.push_back({s, a, p, ip_probability({a, p, s})});
    }
  }
  return rows;
}

std::vector<double> unit_grid(std::size_t steps) {
  if (steps < 2) fail(ErrorCode::kInvalidArgument, "grid needs at least two points");
  std::vector<double> g(steps);
  for (std::size_t i = 0; i < steps; ++i)
    g[i] = static_cast<double>(i) / static_cast<double>(steps - 1);
  return g;
}

void write_curves_csv(std::ostream& out, std::span<const CurveRow> rows) {
  out << "scenario,alpha,p_b,p_ip\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.9f\n", scenario_name(r.scenario), r.alpha,
                  r.p_b, r.p_ip);
    out << buf;
  }
}

}  // namespace prlab::dimpact
