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

#include "datascale/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "datascale/error.hpp"

namespace datascale {
namespace {

std::string CsvField(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string XmlEscape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* Bool(bool value) { return value ? "true" : "false"; }

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

std::string FormatNumber(double value) { return fmt::format("{}", value); }

ReportBundle AnalyzeManifest(const RunSet& set, const PointOptions& options,
                             int exclude_smallest_count) {
  ReportBundle bundle;
  std::vector<UtilityPoint> points = build_utility_points(set, options);
  if (exclude_smallest_count > 0) points = exclude_smallest(points, exclude_smallest_count);
  bundle.fits = fit_by_source(points);
  bundle.points = std::move(points);
  for (std::size_t i = 0; i < bundle.fits.size(); ++i) {
    for (std::size_t j = i + 1; j < bundle.fits.size(); ++j) {
      std::string note;
      if (auto c = crossover(bundle.fits[i], bundle.fits[j], &note)) {
        if (!c->in_range) {
          bundle.warnings.push_back(fmt::format(
              "crossover of {} and {} at {} FLOPs is outside the fitted ranges",
              c->source_a, c->source_b, FormatNumber(c->compute)));
        }
        bundle.crossovers.push_back(std::move(*c));
      }
    }
  }
  return bundle;
}

void WriteFitsCsv(std::ostream& out, std::span<const ScalingFit> fits) {
  out << "source_id,intercept,slope,rmse,n_points,c_lo,c_hi,basis\n";
  for (const ScalingFit& f : fits) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", CsvField(f.source_id),
                       FormatNumber(f.intercept), FormatNumber(f.slope),
                       FormatNumber(f.rmse), f.n_points, FormatNumber(f.c_lo),
                       FormatNumber(f.c_hi), ToString(f.basis));
  }
}

void WritePointsCsv(std::ostream& out, std::span<const UtilityPoint> points,
                    DeltaSign sign) {
  out << "source_id,steps,compute,tokens_upsampled,delta\n";
  for (const UtilityPoint& p : points) {
    double delta = p.delta.value;
    if (sign == DeltaSign::kMetric &&
        DirectionOf(p.delta.metric) == Direction::kLowerIsBetter) {
      delta = -delta;
    }
    out << fmt::format("{},{},{},{},{}\n", CsvField(p.source_id), p.steps,
                       FormatNumber(p.compute), FormatNumber(p.tokens_upsampled),
                       FormatNumber(delta));
  }
}

void WriteRankCsv(std::ostream& out, std::span<const RankedSource> ranking) {
  out << "rank,source_id,predicted_delta,extrapolated,tied\n";
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const RankedSource& r = ranking[i];
    out << fmt::format("{},{},{},{},{}\n", i + 1, CsvField(r.source_id),
                       FormatNumber(r.predicted), Bool(r.extrapolated), Bool(r.tied));
  }
}

void WriteCrossoverCsv(std::ostream& out, std::span<const ScalingFit> fits) {
  out << "source_a,source_b,compute,leader_below,leader_above,in_range,note\n";
  for (std::size_t i = 0; i < fits.size(); ++i) {
    for (std::size_t j = i + 1; j < fits.size(); ++j) {
      std::string note;
      const auto c = crossover(fits[i], fits[j], &note);
      if (c) {
        out << fmt::format("{},{},{},{},{},{},{}\n", CsvField(c->source_a),
                           CsvField(c->source_b), FormatNumber(c->compute),
                           CsvField(c->leader_below), CsvField(c->leader_above),
                           Bool(c->in_range), CsvField(note));
      } else {
        out << fmt::format("{},{},,,,false,{}\n", CsvField(fits[i].source_id),
                           CsvField(fits[j].source_id), CsvField(note));
      }
    }
  }
}

void WritePlanCsv(std::ostream& out, const AllocationPlan& plan,
                  const std::optional<AllocationPlan>& oracle) {
  std::map<std::string, std::string> reasons(plan.excluded.begin(), plan.excluded.end());
  out << "source_id,compute,share,status,reason\n";
  for (const auto& [source, compute] : plan.assignments) {
    auto it = reasons.find(source);
    const bool excluded = it != reasons.end();
    out << fmt::format("{},{},{},{},{}\n", CsvField(source), FormatNumber(compute),
                       FormatNumber(compute / plan.total),
                       excluded ? "excluded" : "included",
                       excluded ? CsvField(it->second) : "");
  }
  out << "\n";
  if (oracle) {
    out << "total,predicted_mixture_utility,oracle_utility,utility_gap\n";
    out << fmt::format("{},{},{},{}\n", FormatNumber(plan.total),
                       FormatNumber(plan.predicted_mixture_utility),
                       FormatNumber(oracle->predicted_mixture_utility),
                       FormatNumber(oracle->predicted_mixture_utility -
                                    plan.predicted_mixture_utility));
  } else {
    out << "total,predicted_mixture_utility\n";
    out << fmt::format("{},{}\n", FormatNumber(plan.total),
                       FormatNumber(plan.predicted_mixture_utility));
  }
}

void WriteCostCsv(std::ostream& out, CostBasis basis, const CostBreakdown& cost) {
  out << "basis,total_tokens,upsampled_tokens,seed_tokens,training_flops,"
         "curation_flops,total_flops\n";
  out << fmt::format("{},{},{},{},{},{},{}\n", ToString(basis),
                     FormatNumber(cost.total_tokens), FormatNumber(cost.upsampled_tokens),
                     FormatNumber(cost.seed_tokens), FormatNumber(cost.training),
                     FormatNumber(cost.curation), FormatNumber(cost.total()));
}

void WriteDiversityCsv(std::ostream& out, const DiversityReport& report) {
  out << "n,distinct,total,ratio,entropy_bits\n";
  for (const NgramStats& s : report.per_n) {
    out << fmt::format("{},{},{},{},{}\n", s.n, s.distinct, s.total,
                       FormatNumber(s.ratio), FormatNumber(s.entropy_bits));
  }
}

std::string RenderSvg(std::span<const ScalingFit> fits,
                      std::span<const UtilityPoint> points, double extent_lo,
                      double extent_hi) {
  constexpr double kWidth = 720;
  constexpr double kHeight = 480;
  constexpr double kMargin = 60;

  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  auto widen_x = [&](double compute) {
    if (compute > 0.0) {
      x_lo = std::min(x_lo, std::log10(compute));
      x_hi = std::max(x_hi, std::log10(compute));
    }
  };
  for (const ScalingFit& f : fits) {
    widen_x(f.c_lo);
    widen_x(f.c_hi);
  }
  for (const UtilityPoint& p : points) widen_x(p.compute);
  widen_x(extent_lo);
  widen_x(extent_hi);
  if (!std::isfinite(x_lo)) {
    x_lo = 0;
    x_hi = 1;
  }
  if (x_hi - x_lo < 1e-9) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }

  auto line_at = [](const ScalingFit& f, double log10_c) {
    return f.intercept + f.slope * log10_c * std::log(10.0);
  };
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -y_lo;
  for (const UtilityPoint& p : points) {
    y_lo = std::min(y_lo, p.delta.value);
    y_hi = std::max(y_hi, p.delta.value);
  }
  for (const ScalingFit& f : fits) {
    for (double x : {x_lo, x_hi}) {
      y_lo = std::min(y_lo, line_at(f, x));
      y_hi = std::max(y_hi, line_at(f, x));
    }
  }
  if (!std::isfinite(y_lo)) {
    y_lo = 0;
    y_hi = 1;
  }
  if (y_hi - y_lo < 1e-12) {
    y_lo -= 0.5;
    y_hi += 0.5;
  }

  auto sx = [&](double x) {
    return kMargin + (x - x_lo) / (x_hi - x_lo) * (kWidth - 2 * kMargin);
  };
  auto sy = [&](double y) {
    return kHeight - kMargin - (y - y_lo) / (y_hi - y_lo) * (kHeight - 2 * kMargin);
  };

  std::map<std::string, const char*> colors;
  auto color_of = [&](const std::string& id) {
    auto [it, inserted] = colors.try_emplace(id, nullptr);
    if (inserted) it->second = kPalette[(colors.size() - 1) % std::size(kPalette)];
    return it->second;
  };
  for (const ScalingFit& f : fits) color_of(f.source_id);

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      kWidth, kHeight);
  svg += fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{3}\" x2=\"{0}\" y2=\"{1}\" stroke=\"black\"/>\n",
      kMargin, kHeight - kMargin, kWidth - kMargin, kMargin);
  svg += fmt::format(
      "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">log10 compute "
      "(FLOPs)</text>\n",
      kWidth / 2, kHeight - 15);
  svg += fmt::format(
      "<text x=\"15\" y=\"{}\" font-size=\"13\" transform=\"rotate(-90 15 {})\" "
      "text-anchor=\"middle\">utility delta</text>\n",
      kHeight / 2, kHeight / 2);
  for (double x : {x_lo, x_hi}) {
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\" "
                       "font-size=\"11\">{:.2f}</text>\n",
                       sx(x), kHeight - kMargin + 16, x);
  }
  for (double y : {y_lo, y_hi}) {
    svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\" "
                       "font-size=\"11\">{:.4g}</text>\n",
                       kMargin - 4, sy(y), y);
  }

  for (const ScalingFit& f : fits) {
    const char* color = color_of(f.source_id);
    const double in_lo = std::log10(f.c_lo);
    const double in_hi = std::log10(f.c_hi);
    auto segment = [&](double a, double b, bool dotted) {
      if (b - a <= 0.0) return;
      svg += fmt::format(
          "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
          "stroke-width=\"2\"{}/>\n",
          sx(a), sy(line_at(f, a)), sx(b), sy(line_at(f, b)), color,
          dotted ? " stroke-dasharray=\"4 4\"" : "");
    };
    segment(x_lo, in_lo, true);
    segment(in_lo, in_hi, false);
    segment(in_hi, x_hi, true);
  }
  for (const UtilityPoint& p : points) {
    if (!(p.compute > 0.0)) continue;
    svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"{}\"/>\n",
                       sx(std::log10(p.compute)), sy(p.delta.value),
                       color_of(p.source_id));
  }
  double legend_y = kMargin;
  for (const auto& [id, color] : colors) {
    svg += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>"
        "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n",
        kWidth - kMargin - 140, legend_y, color, kWidth - kMargin - 122, legend_y + 11,
        XmlEscape(id));
    legend_y += 18;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace datascale
