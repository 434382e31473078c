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

// datascale: fit utility scaling laws to annealing runs and plan data
// acquisition under a compute budget.
//
// Exit codes: 0 success, 1 validation or usage error, 2 internal error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "datascale/allocate.hpp"
#include "datascale/cost_model.hpp"
#include "datascale/diversity.hpp"
#include "datascale/error.hpp"
#include "datascale/ingest.hpp"
#include "datascale/report.hpp"
#include "datascale/scaling.hpp"
#include "datascale/simulate.hpp"

namespace ds = datascale;

namespace {

struct AnalysisFlags {
  std::string manifest;
  std::vector<std::string> tasks;
  std::string basis = "total";
  std::string out;
  std::string svg;
  int exclude_smallest = 0;
  std::string delta_sign = "improvement";
};

struct RankFlags {
  double budget = 0.0;
};

struct AllocateFlags {
  double c_max = 0.0;
  bool with_oracle = false;
  int resolution = 200;
};

struct CostFlags {
  std::string preset;
  bool zero_cost = false;
  std::string kind;
  std::optional<double> expansion_factor;
  std::optional<double> generator_params;
  std::optional<double> annotator_per_token_flops;
  std::optional<double> annotator_params;
  std::optional<double> annotator_training_flops;
  std::optional<double> mbf_recall;
  std::optional<double> training_params;
  long long batch_size = 256;
  long long sequence_length = 8192;
  double upsample_ratio = 0.1;
  double epochs = 1.0;
  std::optional<double> steps;
  std::optional<double> tokens;
  std::string basis = "curation-only";
  std::string out;
};

struct DiversityFlags {
  std::string corpus;
  int n_max = 4;
  std::string format = "text";
  bool boundaries = false;
  std::string out;
};

struct SimulateFlags {
  std::string scenario = "rank-flip";
  std::uint64_t seed = 0;
  std::optional<double> noise;
  std::vector<std::string> sources;
  std::string metric = "brier";
  std::optional<double> baseline_score;
  std::string noise_schedule = "constant";
  std::string basis = "total";
  std::string out;
};

void AddAnalysisFlags(CLI::App* cmd, AnalysisFlags& flags) {
  cmd->add_option("--manifest", flags.manifest, "Experiment manifest (JSON), - for stdin")
      ->required();
  cmd->add_option("--tasks", flags.tasks, "Task id glob(s); default all tasks")
      ->delimiter(',');
  cmd->add_option("--basis", flags.basis, "Cost basis")
      ->check(CLI::IsMember({"curation-only", "total"}));
  cmd->add_option("--out", flags.out, "Output CSV path (default stdout)");
  cmd->add_option("--svg", flags.svg, "Also render an SVG plot to this path");
  cmd->add_option("--exclude-smallest", flags.exclude_smallest,
                  "Drop the K smallest-compute points of each source before fitting")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--delta-sign", flags.delta_sign,
                  "improvement: positive is better; metric: sign of the raw metric change")
      ->check(CLI::IsMember({"improvement", "metric"}));
}

ds::RunSet LoadManifest(const std::string& path) {
  if (path == "-") {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    return ds::parse_manifest(buffer.str());
  }
  return ds::load_manifest(path);
}

ds::ReportBundle Analyze(const AnalysisFlags& flags) {
  ds::PointOptions options;
  options.task_filter = flags.tasks;
  options.basis = ds::ParseCostBasis(flags.basis);
  return ds::AnalyzeManifest(LoadManifest(flags.manifest), options, flags.exclude_smallest);
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ds::ValidationError(fmt::format("cannot open {} for writing", path));
  out << content;
  if (!out.flush()) throw ds::ValidationError(fmt::format("write to {} failed", path));
}

// Output is buffered and only emitted once the command has fully succeeded.
void Emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
    std::fflush(stdout);
  } else {
    WriteFile(path, content);
  }
}

void Warn(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << '\n';
}

void RunFit(const AnalysisFlags& flags) {
  const ds::ReportBundle bundle = Analyze(flags);
  std::ostringstream csv;
  ds::WriteFitsCsv(csv, bundle.fits);
  csv << '\n';
  ds::WritePointsCsv(csv, bundle.points,
                     flags.delta_sign == "metric" ? ds::DeltaSign::kMetric
                                                  : ds::DeltaSign::kImprovement);
  if (!flags.svg.empty()) WriteFile(flags.svg, ds::RenderSvg(bundle.fits, bundle.points));
  Emit(flags.out, csv.str());
  Warn(bundle.warnings);
}

void RunRank(const AnalysisFlags& flags, const RankFlags& rank) {
  const ds::ReportBundle bundle = Analyze(flags);
  const auto ranking = ds::rank_at_budget(bundle.fits, rank.budget);
  std::vector<std::string> warnings;
  for (const ds::RankedSource& r : ranking) {
    if (r.extrapolated) {
      warnings.push_back(fmt::format("extrapolation: budget {} is outside the fitted range of {}",
                                     ds::FormatNumber(rank.budget), r.source_id));
    }
    if (r.tied) warnings.push_back(fmt::format("tie: {} is tied with a neighbour", r.source_id));
  }
  std::ostringstream csv;
  ds::WriteRankCsv(csv, ranking);
  if (!flags.svg.empty()) {
    WriteFile(flags.svg, ds::RenderSvg(bundle.fits, bundle.points, rank.budget, rank.budget));
  }
  Emit(flags.out, csv.str());
  Warn(warnings);
}

void RunCrossover(const AnalysisFlags& flags) {
  const ds::ReportBundle bundle = Analyze(flags);
  std::ostringstream csv;
  ds::WriteCrossoverCsv(csv, bundle.fits);
  if (!flags.svg.empty()) WriteFile(flags.svg, ds::RenderSvg(bundle.fits, bundle.points));
  Emit(flags.out, csv.str());
  Warn(bundle.warnings);
}

void RunAllocate(const AnalysisFlags& flags, const AllocateFlags& alloc) {
  ds::ReportBundle bundle = Analyze(flags);
  const ds::AllocationPlan plan = ds::allocate_proportional(bundle.fits, alloc.c_max);
  std::optional<ds::AllocationPlan> oracle;
  if (alloc.with_oracle) {
    // The oracle checks the split among the sources the plan buys.
    std::vector<ds::ScalingFit> included;
    for (const ds::ScalingFit& fit : bundle.fits) {
      if (plan.assignments.at(fit.source_id) > 0.0) included.push_back(fit);
    }
    oracle = ds::allocate_grid_oracle(included, alloc.c_max, alloc.resolution);
  }
  std::ostringstream csv;
  ds::WritePlanCsv(csv, plan, oracle);
  if (!flags.svg.empty()) {
    WriteFile(flags.svg, ds::RenderSvg(bundle.fits, bundle.points, alloc.c_max, alloc.c_max));
  }
  Emit(flags.out, csv.str());
  Warn(plan.warnings);
}

ds::SourceCostModel CostModelFromFlags(const CostFlags& f) {
  ds::SourceCostModel model;
  if (f.zero_cost) {
    if (!f.kind.empty() && f.kind != "zero_cost") {
      throw ds::ValidationError("--zero-cost conflicts with --kind");
    }
    model.kind = ds::SourceKind::kZeroCost;
  } else if (f.kind.empty()) {
    throw ds::ValidationError("one of --preset, --zero-cost or --kind is required");
  } else {
    model.kind = ds::ParseSourceKind(f.kind);
  }
  const bool generates = model.kind == ds::SourceKind::kSynthetic ||
                         model.kind == ds::SourceKind::kRephraseComposite;
  if (generates && !f.generator_params) {
    throw ds::ConfigError(fmt::format("--generator-params is required for --kind {}",
                                      ds::ToString(model.kind)));
  }
  if (f.generator_params) model.generator = ds::ModelSpec{*f.generator_params};
  model.expansion_factor = f.expansion_factor.value_or(0.0);
  if (f.annotator_params && f.annotator_per_token_flops) {
    throw ds::ValidationError(
        "--annotator-params conflicts with --annotator-per-token-flops");
  }
  if (f.annotator_params) {
    model.annotator_per_token_flops =
        ds::annotator_flops_per_token(ds::ModelSpec{*f.annotator_params});
  } else {
    model.annotator_per_token_flops = f.annotator_per_token_flops.value_or(0.0);
  }
  model.annotator_training_flops = f.annotator_training_flops.value_or(0.0);
  model.mbf_recall = f.mbf_recall.value_or(1.0);
  model.Validate();
  return model;
}

void RunCost(const CostFlags& f) {
  if (f.steps.has_value() == f.tokens.has_value()) {
    throw ds::ValidationError("exactly one of --steps or --tokens is required");
  }
  const ds::CostBasis basis = ds::ParseCostBasis(f.basis);
  ds::AnnealingGeometry geom{f.batch_size, f.sequence_length, f.upsample_ratio, f.epochs};
  geom.Validate();
  const double upsampled =
      f.tokens ? *f.tokens : *f.steps * ds::tokens_per_step(geom).upsampled;
  if (!(upsampled >= 0.0)) throw ds::DomainError("--steps/--tokens must be >= 0");
  const double total_tokens = upsampled / geom.upsample_ratio;

  std::optional<ds::ModelSpec> training;
  if (f.training_params) training = ds::ModelSpec{*f.training_params};
  if (basis == ds::CostBasis::kCurationPlusAnnealing && !training) {
    throw ds::ValidationError("--training-params is required for --basis total");
  }

  ds::CostBreakdown cost;
  if (!f.preset.empty()) {
    if (f.zero_cost || !f.kind.empty()) {
      throw ds::ValidationError("--preset conflicts with --kind/--zero-cost");
    }
    cost.total_tokens = total_tokens;
    cost.upsampled_tokens = upsampled;
    cost.curation = f.preset == "tinygsm" ? ds::tinygsm_curation_cost_tokens(upsampled)
                                          : ds::tinygsm_mind_curation_cost_tokens(upsampled);
    if (training) {
      if (basis == ds::CostBasis::kCurationPlusAnnealing) {
        cost.training = ds::training_flops(total_tokens, *training);
      }
    }
  } else {
    const ds::SourceCostModel model = CostModelFromFlags(f);
    // The training model only matters under the total basis.
    cost = ds::cost_breakdown(model, geom, total_tokens, training.value_or(ds::ModelSpec{1.0}),
                              basis);
  }
  std::ostringstream csv;
  ds::WriteCostCsv(csv, basis, cost);
  Emit(f.out, csv.str());
}

void RunDiversity(const DiversityFlags& f) {
  std::ifstream in(f.corpus, std::ios::binary);
  if (!in) throw ds::ValidationError(fmt::format("cannot open corpus {}", f.corpus));
  const ds::Corpus corpus = f.format == "binary"
                                ? ds::read_binary_corpus(in, f.boundaries)
                                : ds::read_text_corpus(in, f.boundaries);
  const ds::DiversityReport report = ds::profile_corpus(corpus, f.n_max);
  std::ostringstream csv;
  ds::WriteDiversityCsv(csv, report);
  Emit(f.out, csv.str());
  for (const ds::NgramStats& s : report.per_n) {
    if (s.empty) {
      std::cerr << fmt::format("warning: no {}-grams; ratio reported as 1 by convention\n",
                               s.n);
    }
  }
}

ds::GroundTruthSource ParseTruthSource(const std::string& arg) {
  // ID:INTERCEPT:SLOPE
  const auto first = arg.find(':');
  const auto second = arg.find(':', first == std::string::npos ? first : first + 1);
  if (first == std::string::npos || second == std::string::npos || first == 0) {
    throw ds::ValidationError(
        fmt::format("--source expects ID:INTERCEPT:SLOPE, got \"{}\"", arg));
  }
  ds::GroundTruthSource source;
  source.source_id = arg.substr(0, first);
  try {
    std::size_t used = 0;
    const std::string a = arg.substr(first + 1, second - first - 1);
    const std::string b = arg.substr(second + 1);
    source.true_intercept = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    source.true_slope = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
  } catch (const std::logic_error&) {
    throw ds::ValidationError(
        fmt::format("--source expects numeric INTERCEPT and SLOPE, got \"{}\"", arg));
  }
  source.cost_model.kind = ds::SourceKind::kMbf;
  source.cost_model.mbf_recall = 22.0;
  source.cost_model.annotator_per_token_flops = ds::annotator_flops_per_token(ds::ModelSpec{1e8});
  return source;
}

void RunSimulate(const SimulateFlags& f) {
  ds::Scenario scenario;
  if (f.scenario == "rank-flip") {
    if (!f.sources.empty()) throw ds::ValidationError("--source requires --scenario custom");
    scenario = ds::scenario_rank_flip(f.seed, f.noise.value_or(0.1));
  } else {
    if (f.sources.empty()) {
      throw ds::ValidationError("--scenario custom requires at least one --source");
    }
    for (const std::string& arg : f.sources) {
      scenario.sources.push_back(ParseTruthSource(arg));
    }
    scenario.rng_seed = f.seed;
    const double fraction = f.noise.value_or(0.0);
    if (!(fraction >= 0.0)) throw ds::DomainError("--noise must be >= 0");
    const double sigma = fraction * ds::true_delta_range(scenario);
    for (auto& s : scenario.sources) s.noise_sigma = sigma;
    scenario.baseline_noise_sigma = sigma;
  }
  scenario.metric = ds::ParseMetricName(f.metric);
  if (f.baseline_score) {
    scenario.baseline_score = *f.baseline_score;
  } else if (scenario.metric != ds::MetricName::kBrierScore) {
    scenario.baseline_score = 0.4;
  }
  scenario.generation_basis = ds::ParseCostBasis(f.basis);
  scenario.noise_schedule = f.noise_schedule == "inverse-sqrt"
                                ? ds::NoiseSchedule::kInverseSqrtSteps
                                : ds::NoiseSchedule::kConstant;
  Emit(f.out, ds::generate_manifest(scenario));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Utility scaling laws and budget planning for training-data sources"};
  app.require_subcommand(1);

  AnalysisFlags analysis;
  RankFlags rank;
  AllocateFlags alloc;
  CostFlags cost;
  DiversityFlags diversity;
  SimulateFlags simulate;

  auto* fit_cmd = app.add_subcommand("fit", "Fit per-source scaling laws");
  AddAnalysisFlags(fit_cmd, analysis);

  auto* rank_cmd = app.add_subcommand("rank", "Rank sources at a compute budget");
  AddAnalysisFlags(rank_cmd, analysis);
  rank_cmd->add_option("--budget", rank.budget, "Compute budget in FLOPs")->required();

  auto* cross_cmd = app.add_subcommand("crossover", "Pairwise crossover points of fits");
  AddAnalysisFlags(cross_cmd, analysis);

  auto* alloc_cmd = app.add_subcommand("allocate", "Split a budget across sources");
  AddAnalysisFlags(alloc_cmd, analysis);
  alloc_cmd->add_option("--c-max", alloc.c_max, "Total compute budget in FLOPs")->required();
  alloc_cmd->add_flag("--with-oracle", alloc.with_oracle,
                      "Also run the exhaustive grid oracle and report the utility gap");
  alloc_cmd->add_option("--resolution", alloc.resolution, "Grid oracle resolution");

  auto* cost_cmd = app.add_subcommand("cost", "FLOPs cost of acquiring and annealing on a source");
  cost_cmd->add_option("--preset", cost.preset, "Closed-form corpus cost")
      ->check(CLI::IsMember({"tinygsm", "tinygsm-mind"}));
  cost_cmd->add_flag("--zero-cost", cost.zero_cost, "Free source (full replay)");
  cost_cmd->add_option("--kind", cost.kind, "mbf|synthetic|rephrase|zero_cost");
  cost_cmd->add_option("--expansion-factor", cost.expansion_factor);
  cost_cmd->add_option("--generator-params", cost.generator_params);
  cost_cmd->add_option("--annotator-per-token-flops", cost.annotator_per_token_flops);
  cost_cmd->add_option("--annotator-params", cost.annotator_params,
                       "Annotator size; sets per-token flops to 2x");
  cost_cmd->add_option("--annotator-training-flops", cost.annotator_training_flops);
  cost_cmd->add_option("--mbf-recall", cost.mbf_recall);
  cost_cmd->add_option("--training-params", cost.training_params);
  cost_cmd->add_option("--batch-size", cost.batch_size);
  cost_cmd->add_option("--sequence-length", cost.sequence_length);
  cost_cmd->add_option("--upsample-ratio", cost.upsample_ratio);
  cost_cmd->add_option("--epochs", cost.epochs);
  cost_cmd->add_option("--steps", cost.steps, "Annealing steps");
  cost_cmd->add_option("--tokens", cost.tokens, "Upsampled (curated) tokens seen in training");
  cost_cmd->add_option("--basis", cost.basis)
      ->check(CLI::IsMember({"curation-only", "total"}));
  cost_cmd->add_option("--out", cost.out);

  auto* div_cmd = app.add_subcommand("diversity", "Distinct n-gram ratio and n-gram entropy");
  div_cmd->add_option("corpus,--corpus", diversity.corpus, "Corpus file")->required();
  div_cmd->add_option("--n-max", diversity.n_max)->check(CLI::PositiveNumber);
  div_cmd->add_option("--format", diversity.format)
      ->check(CLI::IsMember({"text", "binary"}));
  div_cmd->add_flag("--boundaries", diversity.boundaries,
                    "Do not let n-grams span document boundaries");
  div_cmd->add_option("--out", diversity.out);

  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic run manifest");
  sim_cmd->add_option("--scenario", simulate.scenario)
      ->check(CLI::IsMember({"rank-flip", "custom"}));
  sim_cmd->add_option("--seed", simulate.seed);
  sim_cmd->add_option("--noise", simulate.noise,
                      "Noise std-dev as a fraction of the true delta range");
  sim_cmd->add_option("--source", simulate.sources,
                      "ID:INTERCEPT:SLOPE ground-truth law (custom scenario)");
  sim_cmd->add_option("--metric", simulate.metric)
      ->check(CLI::IsMember({"brier", "accuracy", "exact_match"}));
  sim_cmd->add_option("--baseline-score", simulate.baseline_score);
  sim_cmd->add_option("--noise-schedule", simulate.noise_schedule)
      ->check(CLI::IsMember({"constant", "inverse-sqrt"}));
  sim_cmd->add_option("--basis", simulate.basis, "Basis the ground truth is defined on")
      ->check(CLI::IsMember({"curation-only", "total"}));
  sim_cmd->add_option("--out", simulate.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (fit_cmd->parsed()) RunFit(analysis);
    if (rank_cmd->parsed()) RunRank(analysis, rank);
    if (cross_cmd->parsed()) RunCrossover(analysis);
    if (alloc_cmd->parsed()) RunAllocate(analysis, alloc);
    if (cost_cmd->parsed()) RunCost(cost);
    if (div_cmd->parsed()) RunDiversity(diversity);
    if (sim_cmd->parsed()) RunSimulate(simulate);
  } catch (const ds::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
