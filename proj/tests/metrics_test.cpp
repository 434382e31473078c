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

#include <numeric>

#include "datascale/error.hpp"
#include "doctest.h"
#include "support.hpp"

namespace datascale {
namespace {

TaskScore Score(std::string task, MetricName metric, double value, long long n = 100) {
  return {std::move(task), metric, value, n};
}

TEST_CASE("brier_score fixed cases") {
  CHECK(brier_score(std::vector<double>{1, 0, 0, 0}, 0) == 0.0);
  CHECK(brier_score(std::vector<double>{0, 1, 0, 0}, 0) == 2.0);
  CHECK(brier_score(std::vector<double>{0.25, 0.25, 0.25, 0.25}, 0) == 0.75);
}

TEST_CASE("brier_score errors") {
  CHECK_THROWS_AS(brier_score(std::vector<double>{0.5, 0.4}, 0), ValidationError);
  CHECK_THROWS_WITH(brier_score(std::vector<double>{0.5, 0.4}, 0),
                    doctest::Contains("sum to 0.9"));
  CHECK_THROWS_AS(brier_score(std::vector<double>{0.5, 0.5}, 2), std::out_of_range);
  CHECK_THROWS_AS(brier_score(std::vector<double>{1.5, -0.5}, 0), ValidationError);
  CHECK_NOTHROW(brier_score(std::vector<double>{0.5, 0.5 + 5e-7}, 0));
}

TEST_CASE("brier_score matches the direct loop and is permutation-equivariant") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size(1, 8);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = size(rng);
    std::vector<double> p = testing::RandomSimplex(rng, k);
    const std::size_t correct = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
    const double score = brier_score(p, correct);
    CHECK(std::abs(score - testing::BruteForceBrier(p, correct)) <= 1e-12);
    CHECK(score >= 0.0);
    CHECK(score <= 2.0);

    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> permuted(k);
    std::size_t moved = 0;
    for (std::size_t i = 0; i < k; ++i) {
      permuted[perm[i]] = p[i];
      if (i == correct) moved = perm[i];
    }
    CHECK(std::abs(brier_score(permuted, moved) - score) <= 1e-12);
  }
}

TEST_CASE("brier_score falls as the correct choice gains mass") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + trial % 7;
    const std::vector<double> base = testing::RandomSimplex(rng, k);
    double previous = 3.0;
    for (double target : {0.05, 0.2, 0.4, 0.6, 0.8, 0.95}) {
      // Others renormalized proportionally to the remaining mass.
      std::vector<double> p(k);
      const double rest = 1.0 - base[0];
      for (std::size_t i = 1; i < k; ++i) p[i] = base[i] / rest * (1.0 - target);
      p[0] = target;
      const double s = brier_score(p, 0);
      CHECK(s < previous);
      previous = s;
    }
  }
}

TEST_CASE("exact_match") {
  CHECK(exact_match("42", "42") == 1);
  CHECK(exact_match(" 42 ", "42") == 1);
  CHECK(exact_match("41", "42") == 0);
  CHECK(exact_match("Paris", "paris") == 1);
  CHECK(exact_match("Paris", "paris", IdentityNormalize) == 0);
  CHECK(exact_match(" 42", "42", IdentityNormalize) == 0);
}

TEST_CASE("aggregate_suite") {
  const std::vector<TaskScore> two = {Score("a", MetricName::kAccuracy, 0.4, 100),
                                      Score("b", MetricName::kAccuracy, 0.6, 300)};
  const TaskScore macro = aggregate_suite(two, Weighting::kMacro);
  CHECK(macro.value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(macro.n_examples == 400);
  CHECK(aggregate_suite(two, Weighting::kExampleWeighted).value ==
        doctest::Approx(0.55).epsilon(1e-15));

  const std::vector<TaskScore> one = {Score("a", MetricName::kBrierScore, 0.37, 9)};
  const TaskScore same = aggregate_suite(one);
  CHECK(same.value == 0.37);
  CHECK(same.task_id == "a");

  std::vector<TaskScore> identical;
  for (int i = 0; i < 7; ++i) identical.push_back(Score("t" + std::to_string(i),
                                                        MetricName::kBrierScore, 0.1));
  CHECK(aggregate_suite(identical).value == 0.1);

  CHECK_THROWS_AS(aggregate_suite(std::vector<TaskScore>{}), ValidationError);
  const std::vector<TaskScore> mixed = {Score("a", MetricName::kAccuracy, 0.4),
                                        Score("b", MetricName::kBrierScore, 0.6)};
  CHECK_THROWS_AS(aggregate_suite(mixed), ValidationError);
}

TEST_CASE("utility_delta is improvement-positive") {
  const UtilityDelta brier = utility_delta(Score("t", MetricName::kBrierScore, 0.50),
                                           Score("t", MetricName::kBrierScore, 0.45), "mbf");
  CHECK(brier.value == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(brier.source_id == "mbf");
  const UtilityDelta em = utility_delta(Score("t", MetricName::kExactMatch, 0.30),
                                        Score("t", MetricName::kExactMatch, 0.35));
  CHECK(em.value == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(utility_delta(Score("t", MetricName::kBrierScore, 0.5),
                      Score("t", MetricName::kBrierScore, 0.5))
            .value == 0.0);

  CHECK_THROWS_AS(utility_delta(Score("t", MetricName::kBrierScore, 0.5),
                                Score("u", MetricName::kBrierScore, 0.5)),
                  ValidationError);
  CHECK_THROWS_AS(utility_delta(Score("t", MetricName::kBrierScore, 0.5),
                                Score("t", MetricName::kAccuracy, 0.5)),
                  ValidationError);
}

TEST_CASE("utility_delta antisymmetry") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const MetricName metric = static_cast<MetricName>(i % 3);
    const double scale = metric == MetricName::kBrierScore ? 2.0 : 1.0;
    const TaskScore a = Score("t", metric, scale * unit(rng));
    const TaskScore b = Score("t", metric, scale * unit(rng));
    CHECK(utility_delta(a, b).value == -utility_delta(b, a).value);
  }
}

TEST_CASE("task score ranges") {
  CHECK_THROWS_AS(Score("t", MetricName::kBrierScore, 2.1).Validate(), ValidationError);
  CHECK_THROWS_AS(Score("t", MetricName::kAccuracy, 1.1).Validate(), ValidationError);
  CHECK_THROWS_AS(Score("t", MetricName::kAccuracy, 0.5, 0).Validate(), ValidationError);
  CHECK_NOTHROW(Score("t", MetricName::kBrierScore, 2.0).Validate());
  CHECK(DirectionOf(MetricName::kBrierScore) == Direction::kLowerIsBetter);
  CHECK(DirectionOf(MetricName::kExactMatch) == Direction::kHigherIsBetter);
}

}  // namespace
}  // namespace datascale
