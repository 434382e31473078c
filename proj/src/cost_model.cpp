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

#include "datascale/cost_model.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "datascale/error.hpp"

namespace datascale {
namespace {

void RequireNonNegative(double value, std::string_view what) {
  if (!std::isfinite(value) || value < 0.0) {
    throw DomainError(fmt::format("{} must be finite and >= 0, got {}", what, value));
  }
}

}  // namespace

void ModelSpec::Validate() const {
  if (!std::isfinite(param_count) || param_count <= 0.0) {
    throw DomainError(fmt::format("param_count must be > 0, got {}", param_count));
  }
}

void AnnealingGeometry::Validate() const {
  if (batch_size <= 0) {
    throw DomainError(fmt::format("batch_size must be > 0, got {}", batch_size));
  }
  if (sequence_length <= 0) {
    throw DomainError(
        fmt::format("sequence_length must be > 0, got {}", sequence_length));
  }
  if (!(upsample_ratio > 0.0 && upsample_ratio < 1.0)) {
    throw DomainError(
        fmt::format("upsample_ratio must lie in (0, 1), got {}", upsample_ratio));
  }
  if (!std::isfinite(epochs) || epochs < 1.0) {
    throw DomainError(fmt::format("epochs must be >= 1, got {}", epochs));
  }
}

std::string_view ToString(SourceKind kind) {
  switch (kind) {
    case SourceKind::kMbf:
      return "mbf";
    case SourceKind::kSynthetic:
      return "synthetic";
    case SourceKind::kRephraseComposite:
      return "rephrase";
    case SourceKind::kZeroCost:
      return "zero_cost";
  }
  throw InvariantError("unknown SourceKind");
}

SourceKind ParseSourceKind(std::string_view name) {
  if (name == "mbf") return SourceKind::kMbf;
  if (name == "synthetic") return SourceKind::kSynthetic;
  if (name == "rephrase") return SourceKind::kRephraseComposite;
  if (name == "zero_cost") return SourceKind::kZeroCost;
  throw ValidationError(fmt::format(
      "unknown source kind \"{}\" (expected mbf|synthetic|rephrase|zero_cost)", name));
}

std::string_view ToString(CostBasis basis) {
  return basis == CostBasis::kCurationOnly ? "curation-only" : "total";
}

CostBasis ParseCostBasis(std::string_view name) {
  if (name == "curation-only") return CostBasis::kCurationOnly;
  if (name == "total") return CostBasis::kCurationPlusAnnealing;
  throw ValidationError(
      fmt::format("unknown cost basis \"{}\" (expected curation-only|total)", name));
}

void SourceCostModel::Validate() const {
  RequireNonNegative(expansion_factor, "expansion_factor");
  RequireNonNegative(annotator_per_token_flops, "annotator_per_token_flops");
  RequireNonNegative(annotator_training_flops, "annotator_training_flops");
  if (generator) generator->Validate();

  const bool has_annotator =
      annotator_per_token_flops > 0.0 || annotator_training_flops > 0.0;
  switch (kind) {
    case SourceKind::kZeroCost:
      if (expansion_factor != 0.0 || generator || has_annotator) {
        throw ConfigError("zero_cost source must not set any cost field");
      }
      break;
    case SourceKind::kMbf:
      if (!std::isfinite(mbf_recall) || mbf_recall < 1.0) {
        throw ConfigError(fmt::format("mbf_recall must be >= 1, got {}", mbf_recall));
      }
      if (expansion_factor != 0.0) {
        throw ConfigError("mbf source cannot have an expansion_factor; use rephrase");
      }
      break;
    case SourceKind::kRephraseComposite:
      if (!std::isfinite(mbf_recall) || mbf_recall < 1.0) {
        throw ConfigError(fmt::format("mbf_recall must be >= 1, got {}", mbf_recall));
      }
      if (!generator) throw ConfigError("rephrase source requires generator_params");
      break;
    case SourceKind::kSynthetic:
      if (!generator) throw ConfigError("synthetic source requires generator_params");
      if (has_annotator) {
        throw ConfigError("synthetic source has no annotator; use rephrase for filtered seeds");
      }
      break;
  }
}

double training_flops(double tokens, const ModelSpec& model) {
  model.Validate();
  RequireNonNegative(tokens, "tokens");
  return 6.0 * model.param_count * tokens;
}

double inference_flops_per_token(const ModelSpec& model) {
  model.Validate();
  return 2.0 * model.param_count;
}

TokensPerStep tokens_per_step(const AnnealingGeometry& geom) {
  geom.Validate();
  const double total =
      static_cast<double>(geom.batch_size) * static_cast<double>(geom.sequence_length);
  return {total, geom.upsample_ratio * total};
}

double seed_tokens_required(const AnnealingGeometry& geom, double total_tokens,
                            double expansion_factor) {
  geom.Validate();
  RequireNonNegative(total_tokens, "total_tokens");
  RequireNonNegative(expansion_factor, "expansion_factor");
  return geom.upsample_ratio * total_tokens /
         (geom.epochs * (1.0 + expansion_factor));
}

double seed_token_unit_cost(const SourceCostModel& model, double seed_tokens) {
  if (!model.pays_for_seeds()) {
    throw ConfigError(fmt::format("seed token cost is undefined for {} sources",
                                  ToString(model.kind)));
  }
  RequireNonNegative(seed_tokens, "seed tokens");
  if (seed_tokens == 0.0) throw DomainError("no seed tokens requested");
  return model.mbf_recall * model.annotator_per_token_flops +
         model.annotator_training_flops / seed_tokens;
}

double curation_cost(const SourceCostModel& model, double seed_tokens,
                     double seed_unit_cost) {
  RequireNonNegative(seed_tokens, "seed tokens");
  RequireNonNegative(seed_unit_cost, "seed unit cost");
  if (model.kind == SourceKind::kZeroCost) return 0.0;
  if (model.kind == SourceKind::kSynthetic && !model.generator) {
    throw ConfigError("synthetic source requires generator_params");
  }
  double generation = 0.0;
  if (model.expansion_factor > 0.0) {
    if (!model.generator) {
      throw ConfigError("expansion_factor > 0 requires generator_params");
    }
    generation = inference_flops_per_token(*model.generator) *
                 model.expansion_factor * seed_tokens;
  }
  return seed_unit_cost * seed_tokens + generation;
}

CostBreakdown cost_breakdown(const SourceCostModel& model,
                             const AnnealingGeometry& geom,
                             double total_tokens,
                             const ModelSpec& training_model, CostBasis basis) {
  model.Validate();
  training_model.Validate();
  CostBreakdown out;
  out.total_tokens = total_tokens;
  out.upsampled_tokens = geom.upsample_ratio * total_tokens;
  out.seed_tokens = seed_tokens_required(geom, total_tokens, model.expansion_factor);
  if (basis == CostBasis::kCurationPlusAnnealing) {
    out.training = training_flops(total_tokens, training_model);
  }
  // Nothing curated, nothing spent; the annotator is never trained.
  if (out.seed_tokens > 0.0) {
    const double unit =
        model.pays_for_seeds() ? seed_token_unit_cost(model, out.seed_tokens) : 0.0;
    out.curation = curation_cost(model, out.seed_tokens, unit);
  }
  return out;
}

double total_cost(const SourceCostModel& model, const AnnealingGeometry& geom,
                  double total_tokens, const ModelSpec& training_model,
                  CostBasis basis) {
  return cost_breakdown(model, geom, total_tokens, training_model, basis).total();
}

double tinygsm_curation_cost_tokens(double curated_tokens,
                                    const TinyGsmParams& params) {
  RequireNonNegative(curated_tokens, "curated tokens");
  return curated_tokens * inference_flops_per_token(params.teacher);
}

double tinygsm_curation_cost(double steps, const AnnealingGeometry& geom,
                             const TinyGsmParams& params) {
  RequireNonNegative(steps, "steps");
  return tinygsm_curation_cost_tokens(steps * tokens_per_step(geom).upsampled,
                                      params);
}

double tinygsm_mind_curation_cost_tokens(double curated_tokens,
                                         const TinyGsmParams& params) {
  RequireNonNegative(curated_tokens, "curated tokens");
  return params.teacher_share * tinygsm_curation_cost_tokens(curated_tokens, params) +
         params.rewriter_share * curated_tokens *
             inference_flops_per_token(params.rewriter);
}

double tinygsm_mind_curation_cost(double steps, const AnnealingGeometry& geom,
                                  const TinyGsmParams& params) {
  RequireNonNegative(steps, "steps");
  return tinygsm_mind_curation_cost_tokens(steps * tokens_per_step(geom).upsampled,
                                           params);
}

}  // namespace datascale
