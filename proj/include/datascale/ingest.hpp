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

// Experiment manifests: annealing runs, their per-task scores, and the cost
// models of the sources they drew from.
//
// The on-disk form is JSON:
//
//   {"baseline_id": str,
//    "training_model": {"param_count": int},
//    "geometry": {"batch_size": int, "sequence_length": int,
//                 "upsample_ratio": float, "epochs": float},
//    "sources": {<id>: {"kind": "mbf"|"synthetic"|"rephrase"|"zero_cost",
//                       "expansion_factor": float?, "generator_params": int?,
//                       "annotator_per_token_flops": float?,
//                       "annotator_training_flops": float?,
//                       "mbf_recall": float?}},
//    "runs": [{"source_id": str, "seed": int, "steps": int,
//              "scores": [{"task_id": str,
//                          "metric": "brier"|"accuracy"|"exact_match",
//                          "value": float, "n_examples": int}],
//              "metadata": {str: str}?}]}
//
// Unknown fields are rejected at every level.

#ifndef DATASCALE_INGEST_HPP_
#define DATASCALE_INGEST_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "datascale/cost_model.hpp"
#include "datascale/metrics.hpp"

namespace datascale {

struct RunRecord {
  std::string source_id;
  std::optional<long long> seed;  // nullopt for a seed average
  long long steps = 0;
  AnnealingGeometry geometry;
  std::vector<TaskScore> scores;
  std::map<std::string, std::string> metadata;
};

struct RunSet {
  std::vector<RunRecord> runs;
  std::map<std::string, SourceCostModel> sources;
  std::string baseline_id;
  ModelSpec training_model;
  AnnealingGeometry geometry;

  // Enforces every manifest invariant; throws ValidationError.
  void Validate() const;
};

struct UtilityPoint {
  std::string source_id;
  long long steps = 0;
  double compute = 0.0;
  CostBasis basis = CostBasis::kCurationPlusAnnealing;
  double total_tokens = 0.0;
  double tokens_upsampled = 0.0;
  UtilityDelta delta;
};

RunSet parse_manifest(std::string_view json_text);
RunSet load_manifest(const std::filesystem::path& path);
std::string write_manifest(const RunSet& set);

// Per-task mean over seeds of one (source, steps) configuration.
RunRecord average_seeds(std::span<const RunRecord> runs);

struct PointOptions {
  // Glob patterns over task ids; empty keeps every task.
  std::vector<std::string> task_filter;
  CostBasis basis = CostBasis::kCurationPlusAnnealing;
  Weighting weighting = Weighting::kMacro;
  // Also emit the baseline against itself (delta 0, zero curation cost).
  bool include_baseline = false;
};

// One point per treated (source, steps) configuration, paired with the
// seed-averaged baseline at identical steps. Sorted by (source_id, steps).
std::vector<UtilityPoint> build_utility_points(const RunSet& set,
                                               const PointOptions& options = {});

bool MatchesTaskFilter(std::string_view task_id,
                       std::span<const std::string> patterns);

}  // namespace datascale

#endif  // DATASCALE_INGEST_HPP_
