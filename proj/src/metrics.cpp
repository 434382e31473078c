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

#include "datascale/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "datascale/error.hpp"

namespace datascale {

Direction DirectionOf(MetricName metric) {
  return metric == MetricName::kBrierScore ? Direction::kLowerIsBetter
                                           : Direction::kHigherIsBetter;
}

std::string_view ToString(MetricName metric) {
  switch (metric) {
    case MetricName::kBrierScore:
      return "brier";
    case MetricName::kAccuracy:
      return "accuracy";
    case MetricName::kExactMatch:
      return "exact_match";
  }
  throw InvariantError("unknown MetricName");
}

MetricName ParseMetricName(std::string_view name) {
  if (name == "brier") return MetricName::kBrierScore;
  if (name == "accuracy") return MetricName::kAccuracy;
  if (name == "exact_match") return MetricName::kExactMatch;
  throw ValidationError(fmt::format(
      "unknown metric \"{}\" (expected brier|accuracy|exact_match)", name));
}

MetricRange RangeOf(MetricName metric) {
  return metric == MetricName::kBrierScore ? MetricRange{0.0, 2.0}
                                           : MetricRange{0.0, 1.0};
}

void TaskScore::Validate() const {
  const MetricRange range = RangeOf(metric);
  if (!std::isfinite(value) || value < range.lo || value > range.hi) {
    throw ValidationError(fmt::format("task \"{}\": {} value {} outside [{}, {}]",
                                      task_id, ToString(metric), value, range.lo,
                                      range.hi));
  }
  if (n_examples <= 0) {
    throw ValidationError(
        fmt::format("task \"{}\": n_examples must be > 0, got {}", task_id, n_examples));
  }
}

double brier_score(std::span<const double> probabilities, std::size_t correct_index) {
  if (correct_index >= probabilities.size()) {
    throw std::out_of_range(fmt::format("correct_index {} out of range for {} choices",
                                        correct_index, probabilities.size()));
  }
  double sum = 0.0;
  for (double p : probabilities) {
    if (!std::isfinite(p) || p < 0.0) {
      throw ValidationError(fmt::format("probability {} is not a nonnegative number", p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw ValidationError(fmt::format("probabilities sum to {}, expected 1", sum));
  }
  double score = 0.0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    const double target = k == correct_index ? 1.0 : 0.0;
    const double diff = probabilities[k] - target;
    score += diff * diff;
  }
  return score;
}

std::string DefaultNormalize(std::string_view text) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string IdentityNormalize(std::string_view text) { return std::string(text); }

int exact_match(std::string_view prediction, std::string_view reference,
                const Normalizer& normalizer) {
  return normalizer(prediction) == normalizer(reference) ? 1 : 0;
}

TaskScore aggregate_suite(std::span<const TaskScore> scores, Weighting weighting) {
  if (scores.empty()) throw ValidationError("cannot aggregate an empty task list");
  const MetricName metric = scores.front().metric;
  // Running weighted mean, so identical scores aggregate to themselves exactly.
  double mean = 0.0;
  double weight_sum = 0.0;
  long long examples = 0;
  for (const TaskScore& score : scores) {
    if (score.metric != metric) {
      throw ValidationError(fmt::format(
          "cannot aggregate mixed metrics: task \"{}\" is {}, task \"{}\" is {}",
          scores.front().task_id, ToString(metric), score.task_id,
          ToString(score.metric)));
    }
    const double w =
        weighting == Weighting::kMacro ? 1.0 : static_cast<double>(score.n_examples);
    weight_sum += w;
    mean += (w / weight_sum) * (score.value - mean);
    examples += score.n_examples;
  }
  TaskScore out;
  out.task_id = scores.size() == 1 ? scores.front().task_id : "aggregate";
  out.metric = metric;
  out.value = scores.size() == 1 ? scores.front().value : mean;
  out.n_examples = examples;
  return out;
}

UtilityDelta utility_delta(const TaskScore& baseline, const TaskScore& treated,
                           std::string source_id) {
  if (baseline.task_id != treated.task_id || baseline.metric != treated.metric) {
    throw ValidationError(fmt::format(
        "cannot compare task \"{}\" ({}) against task \"{}\" ({})", treated.task_id,
        ToString(treated.metric), baseline.task_id, ToString(baseline.metric)));
  }
  UtilityDelta out;
  out.metric = treated.metric;
  out.source_id = std::move(source_id);
  out.value = DirectionOf(treated.metric) == Direction::kLowerIsBetter
                  ? baseline.value - treated.value
                  : treated.value - baseline.value;
  return out;
}

}  // namespace datascale
