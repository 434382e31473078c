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

#include "datascale/simulate.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "datascale/error.hpp"
#include "datascale/scaling.hpp"
#include "doctest.h"
#include "support.hpp"

namespace datascale {
namespace {

SourceCostModel MbfCost() {
  SourceCostModel mbf;
  mbf.kind = SourceKind::kMbf;
  mbf.mbf_recall = 22.0;
  mbf.annotator_per_token_flops = 2e8;
  return mbf;
}

Scenario SingleSource(double a, double b, double sigma, std::uint64_t seed) {
  Scenario s;
  s.sources = {{"src", a, b, MbfCost(), sigma}};
  s.rng_seed = seed;
  return s;
}

const ScalingFit& FitFor(const std::vector<ScalingFit>& fits, const std::string& id) {
  for (const auto& f : fits) {
    if (f.source_id == id) return f;
  }
  FAIL("missing fit " << id);
  return fits.front();
}

TEST_CASE("noiseless scenarios round trip through the fitter") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> slope(-0.01, 0.01);
  std::uniform_real_distribution<double> delta(-0.05, 0.05);
  for (int trial = 0; trial < 100; ++trial) {
    const double b = slope(rng);
    // Keep deltas small enough that no score is clamped.
    const double a = delta(rng) - b * 45.0;
    const Scenario scenario = SingleSource(a, b, 0.0, trial);
    const RunSet set = parse_manifest(generate_manifest(scenario));
    const auto fits = fit_by_source(build_utility_points(set));
    REQUIRE(fits.size() == 1);
    CHECK(std::abs(fits[0].slope - b) <= 1e-9 * std::max(1.0, std::abs(b)) + 1e-12);
    CHECK(std::abs(fits[0].intercept - a) <= 1e-9 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("generation is deterministic in the seed") {
  const Scenario a = scenario_rank_flip(42);
  CHECK(generate_manifest(a) == generate_manifest(a));
  CHECK(generate_manifest(a) != generate_manifest(scenario_rank_flip(43)));
}

TEST_CASE("grid covers the expected upsampled token range") {
  const Scenario scenario = SingleSource(0.0, 0.001, 0.0, 0);
  const auto points = build_utility_points(generate_runset(scenario));
  REQUIRE(points.size() == 6);
  CHECK(points.front().tokens_upsampled == doctest::Approx(2.097152e8).epsilon(1e-12));
  CHECK(points.back().tokens_upsampled == doctest::Approx(7.5497472e9).epsilon(1e-12));
}

TEST_CASE("rank-flip scenario") {
  const Scenario scenario = scenario_rank_flip(7, 0.0);
  const auto fits = fit_by_source(build_utility_points(generate_runset(scenario)));
  const ScalingFit& wrap = FitFor(fits, "wrap_like");
  const ScalingFit& mbf = FitFor(fits, "mbf_like");
  const auto x = crossover(wrap, mbf);
  REQUIRE(x.has_value());
  CHECK(x->in_range);
  CHECK(x->leader_below == "wrap_like");
  CHECK(x->leader_above == "mbf_like");

  // Ground-truth crossover from the generating laws.
  const auto& w = scenario.sources[0];
  const auto& m = scenario.sources[1];
  const double truth = std::exp((w.true_intercept - m.true_intercept) /
                                (m.true_slope - w.true_slope));
  CHECK(testing::RelClose(x->compute, truth, 1e-6));

  CHECK(rank_at_budget(fits, x->compute / 2).front().source_id == "wrap_like");
  CHECK(rank_at_budget(fits, x->compute * 2).front().source_id == "mbf_like");

  const Scenario noisy = scenario_rank_flip(7, 0.1);
  CHECK(noisy.sources[0].noise_sigma == doctest::Approx(0.1 * true_delta_range(noisy)));
  CHECK(noisy.baseline_noise_sigma == noisy.sources[0].noise_sigma);
  CHECK_THROWS_AS(scenario_rank_flip(7, -1.0), DomainError);
}

TEST_CASE("noise statistics match the configured sigma") {
  // delta = (baseline mean of two seeds) - treated, so its noise variance is
  // sigma^2 + sigma_b^2 / 2.
  const double sigma = 0.004;
  const double sigma_b = 0.002;
  const int reps = 1000;
  std::vector<double> slopes;
  double sxx = 0.0;
  for (int r = 0; r < reps; ++r) {
    Scenario scenario = SingleSource(-0.4, 0.01, sigma, static_cast<std::uint64_t>(r));
    scenario.baseline_noise_sigma = sigma_b;
    const auto points = build_utility_points(generate_runset(scenario));
    const ScalingFit fit = fit_log_linear(points);
    slopes.push_back(fit.slope);
    if (r == 0) {
      double mean = 0.0;
      for (const auto& p : points) mean += std::log(p.compute) / points.size();
      for (const auto& p : points) sxx += std::pow(std::log(p.compute) - mean, 2);
    }
  }
  double mean = 0.0;
  for (double s : slopes) mean += s / reps;
  double var = 0.0;
  for (double s : slopes) var += (s - mean) * (s - mean) / (reps - 1);
  const double expected_var = (sigma * sigma + sigma_b * sigma_b / 2) / sxx;
  CHECK(std::abs(mean - 0.01) <= 4.0 * std::sqrt(expected_var / reps));
  CHECK(var / expected_var == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("inverse-sqrt noise schedule shrinks with steps") {
  Scenario scenario = SingleSource(-0.4, 0.01, 0.004, 0);
  scenario.noise_schedule = NoiseSchedule::kInverseSqrtSteps;
  std::vector<double> first, last;
  for (int r = 0; r < 400; ++r) {
    scenario.rng_seed = static_cast<std::uint64_t>(r);
    const auto points = build_utility_points(generate_runset(scenario));
    const auto truth = ground_truth_points(scenario);
    first.push_back(points.front().delta.value - truth.front().delta);
    last.push_back(points.back().delta.value - truth.back().delta);
  }
  auto rms = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / v.size());
  };
  CHECK(rms(first) == doctest::Approx(0.004).epsilon(0.15));
  CHECK(rms(last) == doctest::Approx(0.004 * std::sqrt(1.0 / 36)).epsilon(0.15));
}

TEST_CASE("clamped scores are recorded") {
  Scenario scenario = SingleSource(5.0, 0.0, 0.0, 0);
  const RunSet set = generate_runset(scenario);
  bool warned = false;
  for (const auto& run : set.runs) {
    if (run.source_id == "src") {
      CHECK(run.scores.front().value == 0.0);
      warned = warned || run.metadata.contains("warning");
    }
  }
  CHECK(warned);
}

TEST_CASE("scenario validation") {
  Scenario empty;
  CHECK_THROWS_AS(generate_runset(empty), ValidationError);
  Scenario bad_grid = SingleSource(0, 0.01, 0, 0);
  bad_grid.steps_grid = {2000, 1000};
  CHECK_THROWS_AS(generate_runset(bad_grid), ValidationError);
  Scenario zero_cost = SingleSource(0, 0.01, 0, 0);
  zero_cost.sources[0].cost_model = SourceCostModel{};
  zero_cost.generation_basis = CostBasis::kCurationOnly;
  CHECK_THROWS_AS(generate_runset(zero_cost), ValidationError);
}

}  // namespace
}  // namespace datascale
