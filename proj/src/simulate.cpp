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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <fmt/format.h>

#include "datascale/error.hpp"

namespace datascale {
namespace {

double ComputeAt(const Scenario& scenario, const GroundTruthSource& source,
                 long long steps) {
  const double tokens = static_cast<double>(steps) * tokens_per_step(scenario.geometry).total;
  return total_cost(source.cost_model, scenario.geometry, tokens, scenario.training_model,
                    scenario.generation_basis);
}

double SigmaAt(const Scenario& scenario, double sigma, long long steps) {
  if (scenario.noise_schedule == NoiseSchedule::kConstant) return sigma;
  return sigma * std::sqrt(static_cast<double>(scenario.steps_grid.front()) /
                           static_cast<double>(steps));
}

// Converts an improvement-positive delta into a raw score against the
// baseline, clamping into the metric's range.
double ScoreFor(const Scenario& scenario, double delta, RunRecord& run) {
  const double raw = DirectionOf(scenario.metric) == Direction::kLowerIsBetter
                         ? scenario.baseline_score - delta
                         : scenario.baseline_score + delta;
  const MetricRange range = RangeOf(scenario.metric);
  const double clamped = std::clamp(raw, range.lo, range.hi);
  if (clamped != raw) {
    run.metadata["warning"] =
        fmt::format("score {} clamped to [{}, {}]", raw, range.lo, range.hi);
  }
  return clamped;
}

RunRecord MakeRun(const Scenario& scenario, const std::string& source_id, long long seed,
                  long long steps) {
  RunRecord run;
  run.source_id = source_id;
  run.seed = seed;
  run.steps = steps;
  run.geometry = scenario.geometry;
  run.metadata["generator"] = "simulate";
  run.metadata["generation_basis"] = std::string(ToString(scenario.generation_basis));
  return run;
}

}  // namespace

void Scenario::Validate() const {
  if (sources.empty()) throw ValidationError("scenario has no sources");
  if (steps_grid.empty()) throw ValidationError("scenario steps grid is empty");
  for (std::size_t i = 0; i < steps_grid.size(); ++i) {
    if (steps_grid[i] <= 0 || (i > 0 && steps_grid[i] <= steps_grid[i - 1])) {
      throw ValidationError("steps grid must be positive and strictly increasing");
    }
  }
  geometry.Validate();
  training_model.Validate();
  const MetricRange range = RangeOf(metric);
  if (!(baseline_score >= range.lo && baseline_score <= range.hi)) {
    throw ValidationError(fmt::format("baseline score {} outside the {} range",
                                      baseline_score, ToString(metric)));
  }
  if (!std::isfinite(baseline_noise_sigma) || baseline_noise_sigma < 0.0) {
    throw ValidationError("baseline noise sigma must be finite and >= 0");
  }
  if (n_examples <= 0) throw ValidationError("n_examples must be > 0");
  std::set<std::string> ids{baseline_id};
  for (const GroundTruthSource& s : sources) {
    if (!ids.insert(s.source_id).second) {
      throw ValidationError(fmt::format("duplicate source id \"{}\"", s.source_id));
    }
    s.cost_model.Validate();
    if (!std::isfinite(s.noise_sigma) || s.noise_sigma < 0.0) {
      throw ValidationError(
          fmt::format("source \"{}\": noise_sigma must be finite and >= 0", s.source_id));
    }
    if (!std::isfinite(s.true_intercept) || !std::isfinite(s.true_slope)) {
      throw ValidationError(fmt::format("source \"{}\": non-finite law", s.source_id));
    }
    if (!(ComputeAt(*this, s, steps_grid.front()) > 0.0)) {
      throw ValidationError(fmt::format(
          "source \"{}\" has zero compute under the {} basis", s.source_id,
          ToString(generation_basis)));
    }
  }
}

std::vector<TruePoint> ground_truth_points(const Scenario& scenario) {
  scenario.Validate();
  std::vector<TruePoint> points;
  for (const GroundTruthSource& source : scenario.sources) {
    for (long long steps : scenario.steps_grid) {
      const double compute = ComputeAt(scenario, source, steps);
      points.push_back({source.source_id, steps, compute,
                        source.true_intercept + source.true_slope * std::log(compute)});
    }
  }
  return points;
}

double true_delta_range(const Scenario& scenario) {
  const std::vector<TruePoint> points = ground_truth_points(scenario);
  auto [lo, hi] = std::minmax_element(
      points.begin(), points.end(),
      [](const TruePoint& a, const TruePoint& b) { return a.delta < b.delta; });
  return hi->delta - lo->delta;
}

RunSet generate_runset(const Scenario& scenario) {
  const std::vector<TruePoint> truth = ground_truth_points(scenario);
  std::mt19937_64 rng(scenario.rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  RunSet set;
  set.baseline_id = scenario.baseline_id;
  set.training_model = scenario.training_model;
  set.geometry = scenario.geometry;
  set.sources.emplace(scenario.baseline_id, SourceCostModel{});
  for (const GroundTruthSource& source : scenario.sources) {
    set.sources.emplace(source.source_id, source.cost_model);
  }

  auto add_score = [&](RunRecord& run, double value) {
    run.scores.push_back({scenario.task_id, scenario.metric, value, scenario.n_examples});
  };

  // Draw order is fixed: both baseline seeds per step, then every treated
  // point in (source, step) order.
  for (long long steps : scenario.steps_grid) {
    for (long long seed : {0LL, 1LL}) {
      RunRecord run = MakeRun(scenario, scenario.baseline_id, seed, steps);
      const double noise =
          SigmaAt(scenario, scenario.baseline_noise_sigma, steps) * normal(rng);
      // Baseline noise is a shift of the baseline score itself.
      const double raw = scenario.baseline_score + noise;
      const MetricRange range = RangeOf(scenario.metric);
      const double value = std::clamp(raw, range.lo, range.hi);
      if (value != raw) {
        run.metadata["warning"] =
            fmt::format("score {} clamped to [{}, {}]", raw, range.lo, range.hi);
      }
      add_score(run, value);
      set.runs.push_back(std::move(run));
    }
  }
  std::size_t index = 0;
  for (const GroundTruthSource& source : scenario.sources) {
    for (long long steps : scenario.steps_grid) {
      const TruePoint& point = truth[index++];
      RunRecord run = MakeRun(scenario, source.source_id, 0, steps);
      const double noisy =
          point.delta + SigmaAt(scenario, source.noise_sigma, steps) * normal(rng);
      run.metadata["true_delta"] = fmt::format("{}", point.delta);
      add_score(run, ScoreFor(scenario, noisy, run));
      set.runs.push_back(std::move(run));
    }
  }
  set.Validate();
  return set;
}

std::string generate_manifest(const Scenario& scenario) {
  return write_manifest(generate_runset(scenario));
}

Scenario scenario_rank_flip(std::uint64_t rng_seed, double noise_fraction) {
  if (!std::isfinite(noise_fraction) || noise_fraction < 0.0) {
    throw DomainError(fmt::format("noise fraction must be >= 0, got {}", noise_fraction));
  }
  Scenario scenario;
  scenario.rng_seed = rng_seed;

  // Quality-filtered seeds annotated by a ~100M-parameter classifier with a
  // recall of 22 annotated tokens per kept token.
  SourceCostModel mbf;
  mbf.kind = SourceKind::kMbf;
  mbf.mbf_recall = 22.0;
  mbf.annotator_per_token_flops = annotator_flops_per_token(ModelSpec{1e8});

  // The same seeds rephrased by a 3B generator, 2.78B new tokens per 2.25B.
  SourceCostModel wrap = mbf;
  wrap.kind = SourceKind::kRephraseComposite;
  wrap.generator = ModelSpec{3e9};
  wrap.expansion_factor = 2.78 / 2.25;

  scenario.sources = {{"wrap_like", 0.0, -0.005, wrap, 0.0},
                      {"mbf_like", 0.0, 0.01, mbf, 0.0}};

  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (const GroundTruthSource& source : scenario.sources) {
    lo = std::max(lo, ComputeAt(scenario, source, scenario.steps_grid.front()));
    hi = std::min(hi, ComputeAt(scenario, source, scenario.steps_grid.back()));
  }
  if (!(lo < hi)) throw InvariantError("rank-flip sources have disjoint compute ranges");
  const double log_mid = 0.5 * (std::log(lo) + std::log(hi));
  constexpr double kDeltaAtCrossover = 0.03;
  for (GroundTruthSource& source : scenario.sources) {
    source.true_intercept = kDeltaAtCrossover - source.true_slope * log_mid;
  }

  const double sigma = noise_fraction * true_delta_range(scenario);
  for (GroundTruthSource& source : scenario.sources) source.noise_sigma = sigma;
  scenario.baseline_noise_sigma = sigma;
  return scenario;
}

}  // namespace datascale
