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

#include "datascale/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "datascale/error.hpp"

namespace datascale {
namespace {

struct Line {
  double intercept;
  double slope;
  double rmse;
};

// Centered closed-form OLS of y on x.
Line FitLine(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double x_mean = 0.0;
  double y_mean = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x_mean += x[i];
    y_mean += y[i];
  }
  x_mean /= n;
  y_mean /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - x_mean;
    sxx += dx * dx;
    sxy += dx * (y[i] - y_mean);
  }
  if (!(sxx > 0.0)) {
    throw DomainError("degenerate design: need at least two distinct compute values");
  }
  Line line;
  line.slope = sxy / sxx;
  line.intercept = y_mean - line.slope * x_mean;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (line.intercept + line.slope * x[i]);
    sse += r * r;
  }
  line.rmse = std::sqrt(sse / n);
  return line;
}

struct Design {
  std::vector<double> log_compute;
  double c_lo;
  double c_hi;
};

Design CheckPoints(std::span<const UtilityPoint> points) {
  if (points.size() < 2) {
    throw DomainError(fmt::format("need at least 2 points to fit, got {}", points.size()));
  }
  const UtilityPoint& first = points.front();
  Design design{{}, first.compute, first.compute};
  std::set<double> distinct;
  for (const UtilityPoint& p : points) {
    if (p.source_id != first.source_id) {
      throw ValidationError(fmt::format("cannot fit sources \"{}\" and \"{}\" together",
                                        first.source_id, p.source_id));
    }
    if (p.basis != first.basis) {
      throw ValidationError("cannot fit points computed under different cost bases");
    }
    if (!(p.compute > 0.0) || !std::isfinite(p.compute)) {
      throw DomainError(fmt::format("source \"{}\" at steps {}: compute must be > 0, got {}",
                                    p.source_id, p.steps, p.compute));
    }
    design.log_compute.push_back(std::log(p.compute));
    design.c_lo = std::min(design.c_lo, p.compute);
    design.c_hi = std::max(design.c_hi, p.compute);
    distinct.insert(p.compute);
  }
  if (distinct.size() < 2) {
    throw DomainError(fmt::format(
        "degenerate design for \"{}\": need at least two distinct compute values",
        first.source_id));
  }
  return design;
}

}  // namespace

ScalingFit fit_log_linear(std::span<const UtilityPoint> points) {
  const Design design = CheckPoints(points);
  std::vector<double> deltas;
  deltas.reserve(points.size());
  for (const UtilityPoint& p : points) deltas.push_back(p.delta.value);
  const Line line = FitLine(design.log_compute, deltas);

  ScalingFit fit;
  fit.source_id = points.front().source_id;
  fit.intercept = line.intercept;
  fit.slope = line.slope;
  fit.n_points = static_cast<int>(points.size());
  fit.rmse = line.rmse;
  fit.c_lo = design.c_lo;
  fit.c_hi = design.c_hi;
  fit.basis = points.front().basis;
  return fit;
}

std::vector<ScalingFit> fit_by_source(std::span<const UtilityPoint> points) {
  std::map<std::string, std::vector<UtilityPoint>> groups;
  for (const UtilityPoint& p : points) groups[p.source_id].push_back(p);
  std::vector<ScalingFit> fits;
  fits.reserve(groups.size());
  for (const auto& [id, group] : groups) fits.push_back(fit_log_linear(group));
  return fits;
}

std::vector<UtilityPoint> exclude_smallest(std::span<const UtilityPoint> points,
                                           int count) {
  if (count < 0) throw DomainError("exclusion count must be >= 0");
  std::map<std::string, std::vector<UtilityPoint>> groups;
  for (const UtilityPoint& p : points) groups[p.source_id].push_back(p);
  std::vector<UtilityPoint> kept;
  for (auto& [id, group] : groups) {
    std::stable_sort(group.begin(), group.end(),
                     [](const UtilityPoint& a, const UtilityPoint& b) {
                       return a.compute < b.compute;
                     });
    const auto drop = std::min<std::size_t>(static_cast<std::size_t>(count), group.size());
    kept.insert(kept.end(), group.begin() + static_cast<std::ptrdiff_t>(drop), group.end());
  }
  return kept;
}

Prediction predict(const ScalingFit& fit, double compute) {
  if (!(compute > 0.0)) {
    throw DomainError(fmt::format("compute must be > 0, got {}", compute));
  }
  return {fit.intercept + fit.slope * std::log(compute), !fit.covers(compute)};
}

PowerLawFit fit_power_law(std::span<const UtilityPoint> points) {
  const Design design = CheckPoints(points);
  const double sign = points.front().delta.value < 0.0 ? -1.0 : 1.0;
  std::vector<double> log_magnitude;
  for (const UtilityPoint& p : points) {
    if (p.delta.value == 0.0 || (p.delta.value < 0.0) != (sign < 0.0)) {
      throw DomainError(fmt::format(
          "power-law fit of \"{}\" needs deltas of one nonzero sign", p.source_id));
    }
    log_magnitude.push_back(std::log(std::abs(p.delta.value)));
  }
  const Line line = FitLine(design.log_compute, log_magnitude);
  PowerLawFit fit;
  fit.source_id = points.front().source_id;
  fit.log_scale = line.intercept;
  fit.exponent = line.slope;
  fit.sign = sign;
  fit.n_points = static_cast<int>(points.size());
  fit.rmse_log = line.rmse;
  fit.c_lo = design.c_lo;
  fit.c_hi = design.c_hi;
  fit.basis = points.front().basis;
  return fit;
}

Prediction predict(const PowerLawFit& fit, double compute) {
  if (!(compute > 0.0)) {
    throw DomainError(fmt::format("compute must be > 0, got {}", compute));
  }
  return {fit.sign * std::exp(fit.log_scale + fit.exponent * std::log(compute)),
          compute < fit.c_lo || compute > fit.c_hi};
}

std::optional<Crossover> crossover(const ScalingFit& fit_a, const ScalingFit& fit_b,
                                   std::string* note) {
  if (fit_a.basis != fit_b.basis) {
    throw ValidationError("cannot intersect fits computed under different cost bases");
  }
  auto set_note = [&](std::string text) {
    if (note != nullptr) *note = std::move(text);
  };
  if (fit_a.slope == fit_b.slope) {
    set_note(fit_a.intercept == fit_b.intercept ? "identical fits" : "parallel fits");
    return std::nullopt;
  }
  const double log_c = (fit_b.intercept - fit_a.intercept) / (fit_a.slope - fit_b.slope);
  const double c_star = std::exp(log_c);
  if (!std::isfinite(c_star) || !(c_star > 0.0)) {
    set_note(fmt::format("intersection at ln(c) = {} is outside double range", log_c));
    return std::nullopt;
  }
  set_note({});
  Crossover out;
  out.compute = c_star;
  out.source_a = fit_a.source_id;
  out.source_b = fit_b.source_id;
  // Compare in log space so c*/2 and 2c* never leave double range.
  const double below = log_c - std::log(2.0);
  const double above = log_c + std::log(2.0);
  auto at = [](const ScalingFit& f, double log_compute) {
    return f.intercept + f.slope * log_compute;
  };
  out.leader_below = at(fit_a, below) > at(fit_b, below) ? fit_a.source_id : fit_b.source_id;
  out.leader_above = at(fit_a, above) > at(fit_b, above) ? fit_a.source_id : fit_b.source_id;
  out.in_range = fit_a.covers(c_star) && fit_b.covers(c_star);
  return out;
}

std::vector<RankedSource> rank_at_budget(std::span<const ScalingFit> fits, double budget) {
  if (fits.empty()) throw ValidationError("no fits to rank");
  if (!(budget > 0.0)) throw DomainError(fmt::format("budget must be > 0, got {}", budget));
  for (const ScalingFit& fit : fits) {
    if (fit.basis != fits.front().basis) {
      throw ValidationError("cannot rank fits computed under different cost bases");
    }
  }
  std::vector<RankedSource> ranked;
  ranked.reserve(fits.size());
  for (const ScalingFit& fit : fits) {
    const Prediction p = predict(fit, budget);
    ranked.push_back({fit.source_id, p.value, p.extrapolated, false});
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedSource& a, const RankedSource& b) {
    if (a.predicted != b.predicted) return a.predicted > b.predicted;
    return a.source_id < b.source_id;
  });
  auto near = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({std::abs(a), std::abs(b), 1e-300});
  };
  // Group runs of near-equal predictions and order each group by id.
  for (std::size_t begin = 0; begin < ranked.size();) {
    std::size_t end = begin + 1;
    while (end < ranked.size() && near(ranked[end - 1].predicted, ranked[end].predicted)) {
      ++end;
    }
    if (end - begin > 1) {
      std::sort(ranked.begin() + static_cast<std::ptrdiff_t>(begin),
                ranked.begin() + static_cast<std::ptrdiff_t>(end),
                [](const RankedSource& a, const RankedSource& b) {
                  return a.source_id < b.source_id;
                });
      for (std::size_t i = begin; i < end; ++i) ranked[i].tied = true;
    }
    begin = end;
  }
  return ranked;
}

}  // namespace datascale
