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

#ifndef DATASCALE_METRICS_HPP_
#define DATASCALE_METRICS_HPP_

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace datascale {

enum class MetricName { kBrierScore, kAccuracy, kExactMatch };
enum class Direction { kLowerIsBetter, kHigherIsBetter };

Direction DirectionOf(MetricName metric);
std::string_view ToString(MetricName metric);
// Manifest spellings: brier, accuracy, exact_match.
MetricName ParseMetricName(std::string_view name);

// Inclusive valid range of a metric's values.
struct MetricRange {
  double lo;
  double hi;
};
MetricRange RangeOf(MetricName metric);

struct TaskScore {
  std::string task_id;
  MetricName metric = MetricName::kBrierScore;
  double value = 0.0;
  long long n_examples = 1;

  void Validate() const;
};

// Improvement of a treated score over its baseline. Positive always means
// better, whatever the metric's direction.
struct UtilityDelta {
  double value = 0.0;
  MetricName metric = MetricName::kBrierScore;
  std::string source_id;
};

// Multi-class Brier score: sum over all choices of (p_k - y_k)^2, with y
// one-hot at the correct choice. Range [0, 2]. Note this is the sum form, not
// the per-choice mean; absolute values depend on that choice.
double brier_score(std::span<const double> probabilities, std::size_t correct_index);

using Normalizer = std::function<std::string(std::string_view)>;

// Trims ASCII whitespace and lowercases.
std::string DefaultNormalize(std::string_view text);
std::string IdentityNormalize(std::string_view text);

int exact_match(std::string_view prediction, std::string_view reference,
                const Normalizer& normalizer = DefaultNormalize);

enum class Weighting { kMacro, kExampleWeighted };

// Aggregated score carries task_id "aggregate" and the summed n_examples.
TaskScore aggregate_suite(std::span<const TaskScore> scores,
                          Weighting weighting = Weighting::kMacro);

UtilityDelta utility_delta(const TaskScore& baseline, const TaskScore& treated,
                           std::string source_id = {});

}  // namespace datascale

#endif  // DATASCALE_METRICS_HPP_
