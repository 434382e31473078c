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

// Lexical diversity of token corpora: distinct n-gram ratio and the Shannon
// entropy of the n-gram distribution.
//
// N-grams are counted under 64-bit hashed keys. Collisions are possible in
// principle (about one expected per 6e9 distinct n-grams) and are ignored.

#ifndef DATASCALE_DIVERSITY_HPP_
#define DATASCALE_DIVERSITY_HPP_

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace datascale {

using TokenId = std::uint32_t;

// Flat token array with document extents. With respect_boundaries == false
// the corpus is one stream and n-grams may span document ends.
struct Corpus {
  std::vector<TokenId> tokens;
  std::vector<std::size_t> doc_starts{0};  // doc i is [doc_starts[i], doc_starts[i+1])
  bool respect_boundaries = false;

  void AddDocument(std::span<const TokenId> doc);
  std::size_t document_count() const { return doc_starts.size() - 1; }

  // Whitespace-tokenized documents; identical strings get identical ids.
  static Corpus FromText(std::span<const std::string> documents,
                         bool respect_boundaries = false);
};

// Newline-delimited documents of whitespace-separated tokens. The input must
// be valid UTF-8; errors report the byte offset.
Corpus read_text_corpus(std::istream& in, bool respect_boundaries = false);

// Repeated records of a little-endian uint32 token count followed by that
// many little-endian uint32 token ids.
Corpus read_binary_corpus(std::istream& in, bool respect_boundaries = true);

struct NgramStats {
  int n = 0;
  std::uint64_t distinct = 0;
  std::uint64_t total = 0;
  double ratio = 1.0;        // 1.0 by convention when total == 0
  double entropy_bits = 0.0;
  bool empty = true;         // no n-grams of this order
};

struct DiversityReport {
  std::vector<NgramStats> per_n;  // n = 1..n_max
  std::uint64_t total_tokens = 0;
};

double distinct_ngram_ratio(const Corpus& corpus, int n);
double ngram_entropy(const Corpus& corpus, int n);

// All orders 1..n_max. The parallel version shards n-gram keys across
// OpenMP threads; its output is bit-identical to profile_corpus_serial.
DiversityReport profile_corpus(const Corpus& corpus, int n_max);
DiversityReport profile_corpus_serial(const Corpus& corpus, int n_max);

// Hash of the n-gram starting at tokens[0]; exposed for tests.
std::uint64_t HashNgram(std::span<const TokenId> tokens);

}  // namespace datascale

#endif  // DATASCALE_DIVERSITY_HPP_
