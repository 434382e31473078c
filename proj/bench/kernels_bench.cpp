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

// Serial reference against the OpenMP kernels: n-gram profiling and the
// allocation grid oracle.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>
#include <string>
#include <vector>

#include "datascale/allocate.hpp"
#include "datascale/diversity.hpp"

namespace datascale {
namespace {

Corpus RandomCorpus(std::size_t tokens) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<TokenId> token(0, 5000);
  Corpus corpus;
  std::vector<TokenId> doc(500);
  for (std::size_t done = 0; done < tokens; done += doc.size()) {
    for (auto& t : doc) t = token(rng);
    corpus.AddDocument(doc);
  }
  return corpus;
}

std::vector<ScalingFit> Fits(int n) {
  std::vector<ScalingFit> fits;
  for (int i = 0; i < n; ++i) {
    ScalingFit f;
    f.source_id = "s" + std::to_string(i);
    f.slope = 0.001 * (i + 1);
    f.c_lo = 1.0;
    f.c_hi = 1e30;
    fits.push_back(f);
  }
  return fits;
}

void BM_ProfileSerial(benchmark::State& state) {
  const Corpus corpus = RandomCorpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(profile_corpus_serial(corpus, 4));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ProfileParallel(benchmark::State& state) {
  const Corpus corpus = RandomCorpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(profile_corpus(corpus, 4));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

void BM_OracleSerial(benchmark::State& state) {
  const auto fits = Fits(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(allocate_grid_oracle_serial(fits, 1e21, 200));
}

void BM_OracleParallel(benchmark::State& state) {
  const auto fits = Fits(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(allocate_grid_oracle(fits, 1e21, 200));
  state.counters["threads"] = omp_get_max_threads();
}

BENCHMARK(BM_ProfileSerial)->Arg(1 << 18)->Arg(1 << 21)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProfileParallel)->Arg(1 << 18)->Arg(1 << 21)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleSerial)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleParallel)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace datascale

BENCHMARK_MAIN();
