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

#include "datascale/allocate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <omp.h>

#include "datascale/error.hpp"

namespace datascale {
namespace {

void CheckFits(std::span<const ScalingFit> fits) {
  if (fits.empty()) throw ValidationError("no fits to allocate across");
  std::map<std::string, int> seen;
  for (const ScalingFit& fit : fits) {
    if (fit.basis != fits.front().basis) {
      throw ValidationError("cannot allocate across fits with different cost bases");
    }
    if (++seen[fit.source_id] > 1) {
      throw ValidationError(fmt::format("source \"{}\" has two fits", fit.source_id));
    }
  }
}

void CheckBudget(double c_max) {
  if (!(c_max > 0.0) || !std::isfinite(c_max)) {
    throw DomainError(fmt::format("c_max must be > 0, got {}", c_max));
  }
}

void AddExtrapolationWarnings(std::span<const ScalingFit> fits, AllocationPlan& plan) {
  for (const ScalingFit& fit : fits) {
    const double c = plan.assignments.at(fit.source_id);
    if (c > 0.0 && !fit.covers(c)) {
      plan.warnings.push_back(fmt::format(
          "extrapolation: {} assigned {} FLOPs outside fitted range [{}, {}]",
          fit.source_id, c, fit.c_lo, fit.c_hi));
    }
  }
}

struct GridProblem {
  std::span<const ScalingFit> fits;
  int resolution;
  std::vector<double> log_share;  // ln(j c_max / resolution), j = 0..resolution
};

struct GridBest {
  double utility = -std::numeric_limits<double>::infinity();
  std::vector<int> steps;
};

double GridUtility(const GridProblem& problem, std::span<const int> steps) {
  double total = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    total += problem.fits[i].intercept + problem.fits[i].slope * problem.log_share[steps[i]];
  }
  return total;
}

// Enumerates all completions of steps[0..depth) with each remaining source
// taking >= 1 grid step, in lexicographic order.
void Enumerate(const GridProblem& problem, std::vector<int>& steps, std::size_t depth,
               int remaining, GridBest& best) {
  const std::size_t n = problem.fits.size();
  if (depth + 1 == n) {
    steps[depth] = remaining;
    const double u = GridUtility(problem, steps);
    if (u > best.utility) {
      best.utility = u;
      best.steps = steps;
    }
    return;
  }
  const int slots_after = static_cast<int>(n - depth - 1);
  for (int j = 1; j <= remaining - slots_after; ++j) {
    steps[depth] = j;
    Enumerate(problem, steps, depth + 1, remaining - j, best);
  }
}

GridProblem MakeGridProblem(std::span<const ScalingFit> fits, double c_max,
                            int resolution) {
  CheckFits(fits);
  CheckBudget(c_max);
  if (fits.size() > static_cast<std::size_t>(kMaxOracleSources)) {
    throw ValidationError(fmt::format(
        "grid oracle supports at most {} sources, got {}; use allocate_proportional",
        kMaxOracleSources, fits.size()));
  }
  if (resolution < 2 || resolution < static_cast<int>(fits.size())) {
    throw DomainError(fmt::format(
        "resolution must be >= 2 and >= the number of sources, got {}", resolution));
  }
  GridProblem problem{fits, resolution, std::vector<double>(resolution + 1)};
  problem.log_share[0] = -std::numeric_limits<double>::infinity();
  for (int j = 1; j <= resolution; ++j) {
    problem.log_share[j] = std::log(j * c_max / resolution);
  }
  return problem;
}

AllocationPlan PlanFromGrid(const GridProblem& problem, const GridBest& best,
                            double c_max) {
  AllocationPlan plan;
  plan.total = c_max;
  for (std::size_t i = 0; i < problem.fits.size(); ++i) {
    plan.assignments[problem.fits[i].source_id] =
        best.steps[i] * c_max / problem.resolution;
  }
  plan.predicted_mixture_utility = mixture_utility(problem.fits, plan.assignments);
  AddExtrapolationWarnings(problem.fits, plan);
  return plan;
}

}  // namespace

double mixture_utility(std::span<const ScalingFit> fits,
                       const std::map<std::string, double>& assignments) {
  double total = 0.0;
  for (const auto& [source, compute] : assignments) {
    if (!(compute >= 0.0) || !std::isfinite(compute)) {
      throw DomainError(fmt::format("assignment to \"{}\" must be >= 0, got {}", source,
                                    compute));
    }
    if (compute == 0.0) continue;
    auto it = std::find_if(fits.begin(), fits.end(),
                           [&](const ScalingFit& f) { return f.source_id == source; });
    if (it == fits.end()) {
      throw ValidationError(fmt::format("source \"{}\" is assigned compute but has no fit",
                                        source));
    }
    total += it->intercept + it->slope * std::log(compute);
  }
  return total;
}

AllocationPlan allocate_proportional(std::span<const ScalingFit> fits, double c_max) {
  CheckFits(fits);
  CheckBudget(c_max);
  AllocationPlan plan;
  plan.total = c_max;

  double slope_sum = 0.0;
  for (const ScalingFit& fit : fits) {
    if (fit.slope > 0.0) slope_sum += fit.slope;
  }

  if (slope_sum > 0.0) {
    for (const ScalingFit& fit : fits) {
      if (fit.slope > 0.0) {
        plan.assignments[fit.source_id] = fit.slope / slope_sum * c_max;
      } else {
        plan.assignments[fit.source_id] = 0.0;
        plan.excluded.emplace_back(fit.source_id, "non-positive slope");
      }
    }
  } else {
    const std::string best = rank_at_budget(fits, c_max).front().source_id;
    plan.warnings.push_back(fmt::format(
        "no source has a positive slope; whole budget goes to the best single source {}",
        best));
    for (const ScalingFit& fit : fits) {
      plan.assignments[fit.source_id] = fit.source_id == best ? c_max : 0.0;
      if (fit.source_id != best) {
        plan.excluded.emplace_back(fit.source_id, "not the best single source");
      }
    }
  }
  plan.predicted_mixture_utility = mixture_utility(fits, plan.assignments);
  AddExtrapolationWarnings(fits, plan);
  return plan;
}

AllocationPlan allocate_grid_oracle_serial(std::span<const ScalingFit> fits,
                                           double c_max, int resolution) {
  const GridProblem problem = MakeGridProblem(fits, c_max, resolution);
  std::vector<int> steps(fits.size());
  GridBest best;
  Enumerate(problem, steps, 0, resolution, best);
  return PlanFromGrid(problem, best, c_max);
}

AllocationPlan allocate_grid_oracle(std::span<const ScalingFit> fits, double c_max,
                                    int resolution) {
  const GridProblem problem = MakeGridProblem(fits, c_max, resolution);
  const std::size_t n = fits.size();
  if (n == 1) return allocate_grid_oracle_serial(fits, c_max, resolution);

  const int first_max = resolution - static_cast<int>(n - 1);
  std::vector<GridBest> partial(static_cast<std::size_t>(first_max));
#pragma omp parallel for schedule(dynamic)
  for (int j = 1; j <= first_max; ++j) {
    std::vector<int> steps(n);
    steps[0] = j;
    Enumerate(problem, steps, 1, resolution - j, partial[static_cast<std::size_t>(j - 1)]);
  }
  GridBest best;
  for (const GridBest& candidate : partial) {
    if (candidate.utility > best.utility) best = candidate;
  }
  return PlanFromGrid(problem, best, c_max);
}

}  // namespace datascale
