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

// CSV and SVG emission for the command-line tool. CSV is the source of truth;
// the SVG plot only draws what the CSV already contains.
//
// Column orders (header row always written, LF line endings):
//   fits       source_id,intercept,slope,rmse,n_points,c_lo,c_hi,basis
//   points     source_id,steps,compute,tokens_upsampled,delta
//   rank       rank,source_id,predicted_delta,extrapolated,tied
//   crossover  source_a,source_b,compute,leader_below,leader_above,in_range,note
//   plan       source_id,compute,share,status,reason
//   summary    total,predicted_mixture_utility[,oracle_utility,utility_gap]
//   cost       basis,total_tokens,upsampled_tokens,seed_tokens,training_flops,
//              curation_flops,total_flops
//   diversity  n,distinct,total,ratio,entropy_bits

#ifndef DATASCALE_REPORT_HPP_
#define DATASCALE_REPORT_HPP_

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "datascale/allocate.hpp"
#include "datascale/cost_model.hpp"
#include "datascale/diversity.hpp"
#include "datascale/ingest.hpp"
#include "datascale/scaling.hpp"

namespace datascale {

struct ReportBundle {
  std::vector<ScalingFit> fits;
  std::vector<UtilityPoint> points;
  std::vector<Crossover> crossovers;
  std::optional<AllocationPlan> plan;
  std::vector<std::string> warnings;
};

// How the delta column is oriented. kImprovement: positive is better.
// kMetric: sign follows the metric itself, so lower-is-better metrics show
// treated minus baseline.
enum class DeltaSign { kImprovement, kMetric };

// Points and per-source fits of a manifest, plus every pairwise crossover.
// Points are restricted to the fitted sources after `exclude_smallest`.
ReportBundle AnalyzeManifest(const RunSet& set, const PointOptions& options,
                             int exclude_smallest_count = 0);

std::string FormatNumber(double value);

void WriteFitsCsv(std::ostream& out, std::span<const ScalingFit> fits);
void WritePointsCsv(std::ostream& out, std::span<const UtilityPoint> points,
                    DeltaSign sign = DeltaSign::kImprovement);
void WriteRankCsv(std::ostream& out, std::span<const RankedSource> ranking);
// One row per pair of fits, with an empty compute column when they never cross.
void WriteCrossoverCsv(std::ostream& out, std::span<const ScalingFit> fits);
void WritePlanCsv(std::ostream& out, const AllocationPlan& plan,
                  const std::optional<AllocationPlan>& oracle = std::nullopt);
void WriteCostCsv(std::ostream& out, CostBasis basis, const CostBreakdown& cost);
void WriteDiversityCsv(std::ostream& out, const DiversityReport& report);

// Utility against log10 compute: observed points, fitted lines solid inside
// each fit's range and dotted where extrapolated out to `extent`.
std::string RenderSvg(std::span<const ScalingFit> fits,
                      std::span<const UtilityPoint> points, double extent_lo = 0.0,
                      double extent_hi = 0.0);

}  // namespace datascale

#endif  // DATASCALE_REPORT_HPP_
