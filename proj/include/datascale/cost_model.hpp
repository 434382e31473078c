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

// FLOPs accounting for annealing runs and for the curation of their data.
//
// Symbols follow the usual data-acquisition cost calculus:
//   |D|  total tokens seen during annealing
//   r    fraction of |D| drawn from the evaluated source (upsample ratio)
//   e    epochs over the upsampled tokens
//   k    synthetic tokens generated per seed token
//   m    seed tokens, m = r|D| / (e(1 + k))
//   C_t  training cost, 6|P| per token
//   C_g  curation cost, c_s m + c_n k m with c_n = 2|P_g|
//
// All quantities are real-valued FLOPs. Nothing is rounded.

#ifndef DATASCALE_COST_MODEL_HPP_
#define DATASCALE_COST_MODEL_HPP_

#include <optional>
#include <string>
#include <string_view>

namespace datascale {

struct ModelSpec {
  double param_count = 0.0;

  void Validate() const;
};

struct AnnealingGeometry {
  long long batch_size = 256;
  long long sequence_length = 8192;
  double upsample_ratio = 0.1;
  double epochs = 1.0;

  void Validate() const;
};

struct TokensPerStep {
  double total = 0.0;
  double upsampled = 0.0;
};

enum class SourceKind { kMbf, kSynthetic, kRephraseComposite, kZeroCost };

std::string_view ToString(SourceKind kind);
// Accepts the manifest spellings: mbf, synthetic, rephrase, zero_cost.
SourceKind ParseSourceKind(std::string_view name);

// Cost parameters of one data source.
//
// kMbf and kRephraseComposite pay for seed tokens through the annotator
// (recall * per-token annotation + amortized classifier training).
// kSynthetic and kRephraseComposite pay 2|P_g| per generated token.
// kZeroCost is free; full replay uses it.
struct SourceCostModel {
  SourceKind kind = SourceKind::kZeroCost;
  double expansion_factor = 0.0;
  std::optional<ModelSpec> generator;
  double annotator_per_token_flops = 0.0;
  double annotator_training_flops = 0.0;
  double mbf_recall = 1.0;

  void Validate() const;
  bool pays_for_seeds() const {
    return kind == SourceKind::kMbf || kind == SourceKind::kRephraseComposite;
  }
};

enum class CostBasis { kCurationOnly, kCurationPlusAnnealing };

std::string_view ToString(CostBasis basis);
// "curation-only" or "total".
CostBasis ParseCostBasis(std::string_view name);

double training_flops(double tokens, const ModelSpec& model);
double inference_flops_per_token(const ModelSpec& model);

// Default per-token cost of a classifier annotator: one forward pass.
inline double annotator_flops_per_token(const ModelSpec& annotator) {
  return inference_flops_per_token(annotator);
}

TokensPerStep tokens_per_step(const AnnealingGeometry& geom);

// m = r|D| / (e(1 + k)).
double seed_tokens_required(const AnnealingGeometry& geom, double total_tokens,
                            double expansion_factor);

// c_s = R * c_B + C_BERT / m. Throws DomainError when m == 0.
double seed_token_unit_cost(const SourceCostModel& model, double seed_tokens);

// C_g = c_s m + c_n k m.
double curation_cost(const SourceCostModel& model, double seed_tokens,
                     double seed_unit_cost);

struct CostBreakdown {
  double total_tokens = 0.0;
  double upsampled_tokens = 0.0;
  double seed_tokens = 0.0;
  double training = 0.0;  // zero under kCurationOnly
  double curation = 0.0;
  double total() const { return training + curation; }
};

CostBreakdown cost_breakdown(const SourceCostModel& model,
                             const AnnealingGeometry& geom,
                             double total_tokens,
                             const ModelSpec& training_model, CostBasis basis);

// K under the chosen basis.
double total_cost(const SourceCostModel& model, const AnnealingGeometry& geom,
                  double total_tokens, const ModelSpec& training_model,
                  CostBasis basis);

// Closed-form curation costs for the two math-domain synthetic corpora.
// The teacher writes every TinyGSM token; MIND rewrites a 3.6x expansion of
// it with a smaller model, counting 1/3.6 of the tokens at teacher cost and
// 2/3.6 at rewriter cost.
struct TinyGsmParams {
  ModelSpec teacher{175e9};
  ModelSpec rewriter{7e9};
  double teacher_share = 1.0 / 3.6;
  double rewriter_share = 2.0 / 3.6;
};

double tinygsm_curation_cost_tokens(double curated_tokens,
                                    const TinyGsmParams& params = {});
double tinygsm_curation_cost(double steps, const AnnealingGeometry& geom,
                             const TinyGsmParams& params = {});
double tinygsm_mind_curation_cost_tokens(double curated_tokens,
                                         const TinyGsmParams& params = {});
double tinygsm_mind_curation_cost(double steps, const AnnealingGeometry& geom,
                                  const TinyGsmParams& params = {});

}  // namespace datascale

#endif  // DATASCALE_COST_MODEL_HPP_
