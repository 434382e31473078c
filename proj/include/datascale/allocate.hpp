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

// Splitting a compute budget across sources whose utilities are modelled as
// independent log-linear laws: maximize sum_i (a_i + b_i ln c_i) subject to
// sum_i c_i = c_max. For positive slopes the optimum is c_i proportional to
// b_i.

#ifndef DATASCALE_ALLOCATE_HPP_
#define DATASCALE_ALLOCATE_HPP_

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "datascale/scaling.hpp"

namespace datascale {

struct AllocationPlan {
  std::map<std::string, double> assignments;  // every fit appears, excluded at 0
  double total = 0.0;
  double predicted_mixture_utility = 0.0;
  std::vector<std::pair<std::string, std::string>> excluded;  // (source, reason)
  std::vector<std::string> warnings;
};

// Sum of a_i + b_i ln c_i over sources with a positive assignment. Sources
// assigned zero are dropped from the objective rather than evaluated at 0.
double mixture_utility(std::span<const ScalingFit> fits,
                       const std::map<std::string, double>& assignments);

// Closed-form proportional-to-slope split. Sources with b_i <= 0 are
// excluded; if none has a positive slope the whole budget goes to the best
// single source at c_max.
AllocationPlan allocate_proportional(std::span<const ScalingFit> fits, double c_max);

inline constexpr int kMaxOracleSources = 4;

// Exhaustive search over the simplex grid {j c_max / resolution} with every
// source receiving at least one grid step. Verification oracle for
// allocate_proportional. The enumeration is split across OpenMP threads by
// the first source's share and reduced in enumeration order, so the result is
// identical to allocate_grid_oracle_serial.
AllocationPlan allocate_grid_oracle(std::span<const ScalingFit> fits, double c_max,
                                    int resolution);
AllocationPlan allocate_grid_oracle_serial(std::span<const ScalingFit> fits,
                                           double c_max, int resolution);

}  // namespace datascale

#endif  // DATASCALE_ALLOCATE_HPP_
