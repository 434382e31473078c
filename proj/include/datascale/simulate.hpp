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

// Synthetic experiment manifests drawn from known scaling laws, for testing
// the analysis end to end without running any training.

#ifndef DATASCALE_SIMULATE_HPP_
#define DATASCALE_SIMULATE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "datascale/cost_model.hpp"
#include "datascale/ingest.hpp"
#include "datascale/metrics.hpp"

namespace datascale {

struct GroundTruthSource {
  std::string source_id;
  double true_intercept = 0.0;
  double true_slope = 0.0;
  SourceCostModel cost_model;
  double noise_sigma = 0.0;  // std-dev of Gaussian noise on delta
};

enum class NoiseSchedule {
  kConstant,
  // sigma * sqrt(steps_grid.front() / steps): sigma applies at the smallest
  // run and shrinks for longer ones.
  kInverseSqrtSteps,
};

struct Scenario {
  std::vector<GroundTruthSource> sources;
  std::vector<long long> steps_grid{1000, 2000, 4000, 9000, 18000, 36000};
  AnnealingGeometry geometry;
  ModelSpec training_model{7e9};
  std::string baseline_id = "full_replay";
  double baseline_score = 0.6;
  double baseline_noise_sigma = 0.0;
  MetricName metric = MetricName::kBrierScore;
  std::string task_id = "sim_task";
  long long n_examples = 1000;
  CostBasis generation_basis = CostBasis::kCurationPlusAnnealing;
  NoiseSchedule noise_schedule = NoiseSchedule::kConstant;
  std::uint64_t rng_seed = 0;

  void Validate() const;
};

struct TruePoint {
  std::string source_id;
  long long steps = 0;
  double compute = 0.0;  // under the scenario's generation basis
  double delta = 0.0;
};

// Noise-free (compute, delta) of every source at every grid step, in
// (source order, steps order).
std::vector<TruePoint> ground_truth_points(const Scenario& scenario);

// max - min of the true deltas over all sources and grid steps.
double true_delta_range(const Scenario& scenario);

RunSet generate_runset(const Scenario& scenario);
// write_manifest(generate_runset(scenario)).
std::string generate_manifest(const Scenario& scenario);

// Two sources whose ground-truth laws cross at the geometric middle of the
// grid's compute range: "wrap_like" leads at small compute with a falling
// curve, "mbf_like" starts lower and rises. Each source gets noise of
// noise_fraction times the true delta range; the baseline gets the same.
Scenario scenario_rank_flip(std::uint64_t rng_seed, double noise_fraction = 0.1);

}  // namespace datascale

#endif  // DATASCALE_SIMULATE_HPP_
