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

#include "datascale/ingest.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "datascale/error.hpp"
#include "json.hpp"

namespace datascale {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void CheckObject(const json& node, const std::string& path) {
  if (!node.is_object()) {
    throw ValidationError(fmt::format("{}: expected an object", path));
  }
}

void CheckKeys(const json& node, const std::string& path,
               std::initializer_list<std::string_view> allowed) {
  CheckObject(node, path);
  for (const auto& [key, value] : node.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError(fmt::format("{}: unknown field \"{}\"", path, key));
    }
  }
}

const json& Require(const json& node, const std::string& path, std::string_view key) {
  auto it = node.find(key);
  if (it == node.end()) {
    throw ValidationError(fmt::format("{}: missing required field \"{}\"", path, key));
  }
  return *it;
}

std::string GetString(const json& value, const std::string& field) {
  if (!value.is_string()) {
    throw ValidationError(fmt::format("{}: expected a string", field));
  }
  return value.get<std::string>();
}

double GetNumber(const json& value, const std::string& field) {
  if (!value.is_number()) {
    throw ValidationError(fmt::format("{}: expected a number", field));
  }
  const double v = value.get<double>();
  if (!std::isfinite(v)) throw ValidationError(fmt::format("{}: not finite", field));
  return v;
}

// Integer fields also accept integral floats such as 7e9.
long long GetInteger(const json& value, const std::string& field) {
  if (value.is_number_integer()) return value.get<long long>();
  if (value.is_number_float()) {
    const double v = value.get<double>();
    if (std::isfinite(v) && std::floor(v) == v && std::abs(v) < 9.2e18) {
      return static_cast<long long>(v);
    }
  }
  throw ValidationError(fmt::format("{}: expected an integer", field));
}

double OptionalNumber(const json& node, const std::string& path, std::string_view key,
                      double fallback) {
  auto it = node.find(key);
  if (it == node.end()) return fallback;
  return GetNumber(*it, fmt::format("{}.{}", path, key));
}

// Wraps a sub-validation error with the field it came from.
template <typename Fn>
void Annotate(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path, e.what()));
  }
}

std::string ParseErrorLocation(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte, text.size());
  for (std::size_t i = 0; i + 1 < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return fmt::format("line {}, column {}", line, column);
}

SourceCostModel ParseSource(const json& node, const std::string& path) {
  CheckKeys(node, path,
            {"kind", "expansion_factor", "generator_params",
             "annotator_per_token_flops", "annotator_training_flops", "mbf_recall"});
  SourceCostModel model;
  model.kind = ParseSourceKind(GetString(Require(node, path, "kind"), path + ".kind"));
  model.expansion_factor = OptionalNumber(node, path, "expansion_factor", 0.0);
  if (auto it = node.find("generator_params"); it != node.end()) {
    model.generator = ModelSpec{static_cast<double>(
        GetInteger(*it, path + ".generator_params"))};
  }
  model.annotator_per_token_flops =
      OptionalNumber(node, path, "annotator_per_token_flops", 0.0);
  model.annotator_training_flops =
      OptionalNumber(node, path, "annotator_training_flops", 0.0);
  model.mbf_recall = OptionalNumber(node, path, "mbf_recall", 1.0);
  Annotate(path, [&] { model.Validate(); });
  return model;
}

TaskScore ParseScore(const json& node, const std::string& path) {
  CheckKeys(node, path, {"task_id", "metric", "value", "n_examples"});
  TaskScore score;
  score.task_id = GetString(Require(node, path, "task_id"), path + ".task_id");
  score.metric = ParseMetricName(GetString(Require(node, path, "metric"), path + ".metric"));
  score.value = GetNumber(Require(node, path, "value"), path + ".value");
  score.n_examples = GetInteger(Require(node, path, "n_examples"), path + ".n_examples");
  Annotate(path, [&] { score.Validate(); });
  return score;
}

RunRecord ParseRun(const json& node, const std::string& path,
                   const AnnealingGeometry& geometry) {
  CheckKeys(node, path, {"source_id", "seed", "steps", "scores", "metadata"});
  RunRecord run;
  run.geometry = geometry;
  run.source_id = GetString(Require(node, path, "source_id"), path + ".source_id");
  run.seed = GetInteger(Require(node, path, "seed"), path + ".seed");
  run.steps = GetInteger(Require(node, path, "steps"), path + ".steps");
  const json& scores = Require(node, path, "scores");
  if (!scores.is_array()) throw ValidationError(path + ".scores: expected an array");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    run.scores.push_back(ParseScore(scores[i], fmt::format("{}.scores[{}]", path, i)));
  }
  if (auto it = node.find("metadata"); it != node.end()) {
    CheckObject(*it, path + ".metadata");
    for (const auto& [key, value] : it->items()) {
      run.metadata[key] = GetString(value, fmt::format("{}.metadata.{}", path, key));
    }
  }
  return run;
}

ordered_json SourceToJson(const SourceCostModel& model) {
  ordered_json out;
  out["kind"] = std::string(ToString(model.kind));
  if (model.expansion_factor != 0.0) out["expansion_factor"] = model.expansion_factor;
  if (model.generator) {
    out["generator_params"] = static_cast<long long>(model.generator->param_count);
  }
  if (model.annotator_per_token_flops != 0.0) {
    out["annotator_per_token_flops"] = model.annotator_per_token_flops;
  }
  if (model.annotator_training_flops != 0.0) {
    out["annotator_training_flops"] = model.annotator_training_flops;
  }
  if (model.pays_for_seeds()) out["mbf_recall"] = model.mbf_recall;
  return out;
}

std::set<std::string> TaskIds(const RunRecord& run) {
  std::set<std::string> ids;
  for (const TaskScore& s : run.scores) ids.insert(s.task_id);
  return ids;
}

}  // namespace

void RunSet::Validate() const {
  training_model.Validate();
  geometry.Validate();
  for (const auto& [id, model] : sources) {
    Annotate(fmt::format("sources.{}", id), [&] { model.Validate(); });
  }
  if (auto it = sources.find(baseline_id);
      it != sources.end() && it->second.kind != SourceKind::kZeroCost) {
    throw ValidationError(fmt::format(
        "baseline source \"{}\" must have kind zero_cost", baseline_id));
  }
  std::set<std::tuple<std::string, long long, long long>> keys;
  bool has_baseline = false;
  for (const RunRecord& run : runs) {
    const std::string where = fmt::format("run ({}, seed {}, steps {})", run.source_id,
                                          run.seed.value_or(-1), run.steps);
    if (run.steps <= 0) {
      throw ValidationError(fmt::format("{}: steps must be > 0", where));
    }
    if (run.scores.empty()) throw ValidationError(where + ": scores must be nonempty");
    std::set<std::string> seen_tasks;
    for (const TaskScore& s : run.scores) {
      Annotate(where, [&] { s.Validate(); });
      if (!seen_tasks.insert(s.task_id).second) {
        throw ValidationError(fmt::format("{}: task \"{}\" listed twice", where, s.task_id));
      }
    }
    if (run.source_id == baseline_id) {
      has_baseline = true;
    } else if (!sources.contains(run.source_id)) {
      throw ValidationError(
          fmt::format("{}: source \"{}\" has no cost model", where, run.source_id));
    }
    if (run.seed &&
        !keys.emplace(run.source_id, *run.seed, run.steps).second) {
      throw ValidationError(fmt::format(
          "duplicate run (source_id=\"{}\", seed={}, steps={})", run.source_id,
          *run.seed, run.steps));
    }
  }
  if (!has_baseline) {
    throw ValidationError(fmt::format("baseline runs not found (baseline_id \"{}\")",
                                      baseline_id));
  }
}

RunSet parse_manifest(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("manifest parse error at {} (byte {}): {}",
                                      ParseErrorLocation(json_text, e.byte), e.byte,
                                      e.what()));
  }
  CheckKeys(root, "manifest",
            {"baseline_id", "training_model", "geometry", "sources", "runs"});

  RunSet set;
  set.baseline_id = GetString(Require(root, "manifest", "baseline_id"), "baseline_id");

  const json& model = Require(root, "manifest", "training_model");
  CheckKeys(model, "training_model", {"param_count"});
  set.training_model.param_count = static_cast<double>(GetInteger(
      Require(model, "training_model", "param_count"), "training_model.param_count"));

  const json& geom = Require(root, "manifest", "geometry");
  CheckKeys(geom, "geometry", {"batch_size", "sequence_length", "upsample_ratio", "epochs"});
  set.geometry.batch_size =
      GetInteger(Require(geom, "geometry", "batch_size"), "geometry.batch_size");
  set.geometry.sequence_length = GetInteger(Require(geom, "geometry", "sequence_length"),
                                            "geometry.sequence_length");
  set.geometry.upsample_ratio = GetNumber(Require(geom, "geometry", "upsample_ratio"),
                                          "geometry.upsample_ratio");
  set.geometry.epochs = OptionalNumber(geom, "geometry", "epochs", 1.0);

  const json& sources = Require(root, "manifest", "sources");
  CheckObject(sources, "sources");
  for (const auto& [id, node] : sources.items()) {
    set.sources.emplace(id, ParseSource(node, "sources." + id));
  }
  // Full replay costs nothing and need not be declared.
  set.sources.try_emplace(set.baseline_id, SourceCostModel{});

  const json& runs = Require(root, "manifest", "runs");
  if (!runs.is_array()) throw ValidationError("runs: expected an array");
  for (std::size_t i = 0; i < runs.size(); ++i) {
    set.runs.push_back(ParseRun(runs[i], fmt::format("runs[{}]", i), set.geometry));
  }
  set.Validate();
  return set;
}

RunSet load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError(fmt::format("cannot open manifest {}", path.string()));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_manifest(buffer.str());
}

std::string write_manifest(const RunSet& set) {
  ordered_json root;
  root["baseline_id"] = set.baseline_id;
  root["training_model"]["param_count"] =
      static_cast<long long>(set.training_model.param_count);
  root["geometry"]["batch_size"] = set.geometry.batch_size;
  root["geometry"]["sequence_length"] = set.geometry.sequence_length;
  root["geometry"]["upsample_ratio"] = set.geometry.upsample_ratio;
  root["geometry"]["epochs"] = set.geometry.epochs;
  root["sources"] = ordered_json::object();
  for (const auto& [id, model] : set.sources) root["sources"][id] = SourceToJson(model);
  root["runs"] = ordered_json::array();
  for (const RunRecord& run : set.runs) {
    ordered_json node;
    node["source_id"] = run.source_id;
    node["seed"] = run.seed.value_or(0);
    node["steps"] = run.steps;
    node["scores"] = ordered_json::array();
    for (const TaskScore& s : run.scores) {
      node["scores"].push_back({{"task_id", s.task_id},
                                {"metric", std::string(ToString(s.metric))},
                                {"value", s.value},
                                {"n_examples", s.n_examples}});
    }
    if (!run.metadata.empty()) {
      node["metadata"] = ordered_json::object();
      for (const auto& [k, v] : run.metadata) node["metadata"][k] = v;
    }
    root["runs"].push_back(std::move(node));
  }
  return root.dump(2) + "\n";
}

RunRecord average_seeds(std::span<const RunRecord> runs) {
  if (runs.empty()) throw ValidationError("cannot average an empty run list");
  const RunRecord& first = runs.front();
  if (runs.size() == 1) return first;
  const std::set<std::string> tasks = TaskIds(first);
  for (const RunRecord& run : runs.subspan(1)) {
    if (run.source_id != first.source_id || run.steps != first.steps) {
      throw ValidationError(fmt::format(
          "cannot average runs of different configurations: ({}, {}) vs ({}, {})",
          first.source_id, first.steps, run.source_id, run.steps));
    }
    const AnnealingGeometry& g = run.geometry;
    const AnnealingGeometry& f = first.geometry;
    if (g.batch_size != f.batch_size || g.sequence_length != f.sequence_length ||
        g.upsample_ratio != f.upsample_ratio || g.epochs != f.epochs) {
      throw ValidationError("cannot average runs with different geometry");
    }
    const std::set<std::string> other = TaskIds(run);
    if (other != tasks) {
      std::vector<std::string> diff;
      std::set_symmetric_difference(tasks.begin(), tasks.end(), other.begin(),
                                    other.end(), std::back_inserter(diff));
      throw ValidationError(fmt::format("task sets differ across seeds of ({}, {}): {}",
                                        first.source_id, first.steps,
                                        fmt::join(diff, ", ")));
    }
  }
  RunRecord out = first;
  out.seed.reset();
  for (TaskScore& score : out.scores) {
    double sum = 0.0;
    for (const RunRecord& run : runs) {
      auto it = std::find_if(run.scores.begin(), run.scores.end(),
                             [&](const TaskScore& s) { return s.task_id == score.task_id; });
      if (it->metric != score.metric) {
        throw ValidationError(
            fmt::format("task \"{}\" changes metric across seeds", score.task_id));
      }
      sum += it->value;
    }
    score.value = sum / static_cast<double>(runs.size());
  }
  return out;
}

bool MatchesTaskFilter(std::string_view task_id, std::span<const std::string> patterns) {
  if (patterns.empty()) return true;
  const std::string id(task_id);
  return std::any_of(patterns.begin(), patterns.end(), [&](const std::string& p) {
    return fnmatch(p.c_str(), id.c_str(), 0) == 0;
  });
}

std::vector<UtilityPoint> build_utility_points(const RunSet& set,
                                               const PointOptions& options) {
  std::map<std::pair<std::string, long long>, std::vector<RunRecord>> groups;
  for (const RunRecord& run : set.runs) {
    groups[{run.source_id, run.steps}].push_back(run);
  }

  std::map<long long, RunRecord> baselines;
  for (const auto& [key, runs] : groups) {
    if (key.first == set.baseline_id) baselines.emplace(key.second, average_seeds(runs));
  }

  const TokensPerStep per_step = tokens_per_step(set.geometry);
  std::vector<UtilityPoint> points;
  for (const auto& [key, runs] : groups) {
    const auto& [source_id, steps] = key;
    if (source_id == set.baseline_id && !options.include_baseline) continue;

    const RunRecord treated = average_seeds(runs);
    auto base_it = baselines.find(steps);
    if (base_it == baselines.end()) {
      throw ValidationError(fmt::format(
          "no baseline run at matching steps for (source_id=\"{}\", steps={})",
          source_id, steps));
    }
    const RunRecord& baseline = base_it->second;

    std::vector<TaskScore> treated_scores;
    std::vector<TaskScore> baseline_scores;
    for (const TaskScore& score : treated.scores) {
      if (!MatchesTaskFilter(score.task_id, options.task_filter)) continue;
      auto it = std::find_if(baseline.scores.begin(), baseline.scores.end(),
                             [&](const TaskScore& s) { return s.task_id == score.task_id; });
      if (it == baseline.scores.end()) {
        throw ValidationError(fmt::format(
            "task \"{}\" of (source_id=\"{}\", steps={}) missing from baseline",
            score.task_id, source_id, steps));
      }
      treated_scores.push_back(score);
      baseline_scores.push_back(*it);
    }
    if (treated_scores.empty()) {
      throw ValidationError(fmt::format(
          "task filter selects no tasks for (source_id=\"{}\", steps={})", source_id,
          steps));
    }

    UtilityPoint point;
    point.source_id = source_id;
    point.steps = steps;
    point.basis = options.basis;
    point.total_tokens = static_cast<double>(steps) * per_step.total;
    point.tokens_upsampled = set.geometry.upsample_ratio * point.total_tokens;
    point.delta = utility_delta(aggregate_suite(baseline_scores, options.weighting),
                                aggregate_suite(treated_scores, options.weighting),
                                source_id);
    point.compute = total_cost(set.sources.at(source_id), set.geometry,
                               point.total_tokens, set.training_model, options.basis);
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace datascale
