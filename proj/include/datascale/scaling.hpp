/*
 * Copyright 2026 The datascale Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Per-source utility scaling laws, delta(c) = a + b ln(c), fitted by ordinary
// least squares against the natural log of compute.

#ifndef DATASCALE_SCALING_HPP_
#define DATASCALE_SCALING_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "datascale/cost_model.hpp"
#include "datascale/ingest.hpp"

namespace datascale {

struct ScalingFit {
  std::string source_id;
  double intercept = 0.0;
  double slope = 0.0;  // per natural-log FLOP
  int n_points = 0;
  double rmse = 0.0;
  double c_lo = 0.0;
  double c_hi = 0.0;
  CostBasis basis = CostBasis::kCurationPlusAnnealing;

  bool covers(double compute) const { return compute >= c_lo && compute <= c_hi; }
};

struct Prediction {
  double value = 0.0;
  bool extrapolated = false;
};

ScalingFit fit_log_linear(std::span<const UtilityPoint> points);

// Fits every source present in `points` independently; sorted by source_id.
std::vector<ScalingFit> fit_by_source(std::span<const UtilityPoint> points);

// Drops, per source, the `count` points with the smallest compute.
std::vector<UtilityPoint> exclude_smallest(std::span<const UtilityPoint> points,
                                           int count);

Prediction predict(const ScalingFit& fit, double compute);

// ln|delta| = log_scale + exponent ln(c), valid only when every delta has the
// same nonzero sign.
struct PowerLawFit {
  std::string source_id;
  double log_scale = 0.0;
  double exponent = 0.0;
  double sign = 1.0;
  int n_points = 0;
  double rmse_log = 0.0;  // residuals of ln|delta|
  double c_lo = 0.0;
  double c_hi = 0.0;
  CostBasis basis = CostBasis::kCurationPlusAnnealing;
};

PowerLawFit fit_power_law(std::span<const UtilityPoint> points);
Prediction predict(const PowerLawFit& fit, double compute);

struct Crossover {
  double compute = 0.0;
  std::string source_a;
  std::string source_b;
  std::string leader_below;
  std::string leader_above;
  bool in_range = false;  // inside both fits' compute ranges
};

// Intersection of two fitted curves. Returns nullopt for parallel or
// identical fits (explained in *note when given) and when the intersection
// overflows double range.
std::optional<Crossover> crossover(const ScalingFit& fit_a, const ScalingFit& fit_b,
                                   std::string* note = nullptr);

struct RankedSource {
  std::string source_id;
  double predicted = 0.0;
  bool extrapolated = false;
  bool tied = false;  // within 1e-12 relative of a neighbour
};

// Predicted utility of every source when each receives the whole budget.
// Because compute already prices each source's tokens, this is the
// budget-constrained argmax over sources: the head is the recommendation.
std::vector<RankedSource> rank_at_budget(std::span<const ScalingFit> fits, double budget);

}  // namespace datascale

#endif  // DATASCALE_SCALING_HPP_
