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

#include "datascale/diversity.hpp"

#include <cmath>
#include <iterator>
#include <map>

#include <absl/container/flat_hash_map.h>
#include <fmt/format.h>
#include <omp.h>

#include "datascale/error.hpp"

namespace datascale {
namespace {

constexpr std::uint64_t kHashSeed = 0x2545f4914f6cdd1dULL;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Extend(std::uint64_t hash, TokenId token) {
  return SplitMix64(hash * 0x100000001b3ULL + token + 1);
}

using CountMap = absl::flat_hash_map<std::uint64_t, std::uint64_t>;
// count value -> number of distinct n-grams with that count
using Histogram = std::map<std::uint64_t, std::uint64_t>;

void CheckOrder(int n) {
  if (n < 1) throw DomainError(fmt::format("n-gram order must be >= 1, got {}", n));
}

// Exclusive end of the window in which n-grams starting at `pos` must lie.
struct Limits {
  const Corpus& corpus;
  std::size_t doc = 0;

  std::size_t EndFor(std::size_t pos) {
    if (!corpus.respect_boundaries) return corpus.tokens.size();
    while (corpus.doc_starts[doc + 1] <= pos) ++doc;
    return corpus.doc_starts[doc + 1];
  }
};

// Feeds every n-gram of order 1..n_max whose key falls in `shard` (of
// `shard_count`) into counts[n-1].
void CountShard(const Corpus& corpus, int n_max, std::uint64_t shard,
                std::uint64_t shard_count, std::vector<CountMap>& counts) {
  const std::vector<TokenId>& tokens = corpus.tokens;
  Limits limits{corpus};
  for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
    const std::size_t end = limits.EndFor(pos);
    std::uint64_t hash = kHashSeed;
    for (int n = 1; n <= n_max && pos + static_cast<std::size_t>(n) <= end; ++n) {
      hash = Extend(hash, tokens[pos + static_cast<std::size_t>(n) - 1]);
      if (shard_count == 1 || hash % shard_count == shard) ++counts[n - 1][hash];
    }
  }
}

std::uint64_t TotalNgrams(const Corpus& corpus, int n) {
  if (!corpus.respect_boundaries) {
    const auto size = corpus.tokens.size();
    return size >= static_cast<std::size_t>(n) ? size - static_cast<std::size_t>(n) + 1 : 0;
  }
  std::uint64_t total = 0;
  for (std::size_t d = 0; d < corpus.document_count(); ++d) {
    const std::size_t len = corpus.doc_starts[d + 1] - corpus.doc_starts[d];
    if (len >= static_cast<std::size_t>(n)) total += len - static_cast<std::size_t>(n) + 1;
  }
  return total;
}

NgramStats StatsFromHistogram(int n, const Histogram& histogram) {
  NgramStats stats;
  stats.n = n;
  for (const auto& [count, multiplicity] : histogram) {
    stats.distinct += multiplicity;
    stats.total += count * multiplicity;
  }
  stats.empty = stats.total == 0;
  if (stats.empty) return stats;
  stats.ratio = static_cast<double>(stats.distinct) / static_cast<double>(stats.total);
  // Ascending count order keeps the floating sum independent of hash-map
  // iteration order. A single histogram bucket (uniform distribution) gives
  // exactly log2(distinct).
  const auto total = static_cast<double>(stats.total);
  double entropy = 0.0;
  for (const auto& [count, multiplicity] : histogram) {
    const auto mass = static_cast<double>(count * multiplicity);
    entropy += (mass / total) * std::log2(total / static_cast<double>(count));
  }
  stats.entropy_bits = entropy;
  return stats;
}

void AddToHistogram(const CountMap& counts, Histogram& histogram) {
  for (const auto& [key, count] : counts) ++histogram[count];
}

DiversityReport BuildReport(const Corpus& corpus, int n_max,
                            const std::vector<Histogram>& histograms) {
  DiversityReport report;
  report.total_tokens = corpus.tokens.size();
  for (int n = 1; n <= n_max; ++n) {
    NgramStats stats = StatsFromHistogram(n, histograms[n - 1]);
    if (stats.total != TotalNgrams(corpus, n)) {
      throw InvariantError(fmt::format("n={} counted {} n-grams, expected {}", n,
                                       stats.total, TotalNgrams(corpus, n)));
    }
    report.per_n.push_back(stats);
  }
  return report;
}

std::uint32_t ReadLe32(const unsigned char* bytes) {
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

// Length of the valid UTF-8 sequence at text[pos], or 0 if invalid.
std::size_t Utf8SequenceLength(std::string_view text, std::size_t pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  if (lead < 0x80) return 1;
  std::size_t len;
  std::uint32_t min_code;
  std::uint32_t code;
  if ((lead & 0xe0) == 0xc0) {
    len = 2, min_code = 0x80, code = lead & 0x1f;
  } else if ((lead & 0xf0) == 0xe0) {
    len = 3, min_code = 0x800, code = lead & 0x0f;
  } else if ((lead & 0xf8) == 0xf0) {
    len = 4, min_code = 0x10000, code = lead & 0x07;
  } else {
    return 0;
  }
  if (pos + len > text.size()) return 0;
  for (std::size_t i = 1; i < len; ++i) {
    const auto c = static_cast<unsigned char>(text[pos + i]);
    if ((c & 0xc0) != 0x80) return 0;
    code = (code << 6) | (c & 0x3f);
  }
  if (code < min_code || code > 0x10ffff || (code >= 0xd800 && code <= 0xdfff)) return 0;
  return len;
}

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

class Vocabulary {
 public:
  TokenId Intern(std::string_view token) {
    auto [it, inserted] = ids_.try_emplace(absl::string_view(token.data(), token.size()),
                                          static_cast<TokenId>(ids_.size()));
    if (inserted && ids_.size() > 0xffffffffULL) {
      throw ValidationError("vocabulary exceeds 2^32 distinct tokens");
    }
    return it->second;
  }

 private:
  absl::flat_hash_map<std::string, TokenId> ids_;
};

}  // namespace

void Corpus::AddDocument(std::span<const TokenId> doc) {
  tokens.insert(tokens.end(), doc.begin(), doc.end());
  doc_starts.push_back(tokens.size());
}

Corpus Corpus::FromText(std::span<const std::string> documents, bool respect_boundaries) {
  Corpus corpus;
  corpus.respect_boundaries = respect_boundaries;
  Vocabulary vocab;
  std::vector<TokenId> doc;
  for (const std::string& text : documents) {
    doc.clear();
    std::size_t pos = 0;
    while (pos < text.size()) {
      while (pos < text.size() && (IsSpace(text[pos]) || text[pos] == '\n')) ++pos;
      const std::size_t start = pos;
      while (pos < text.size() && !IsSpace(text[pos]) && text[pos] != '\n') ++pos;
      if (pos > start) doc.push_back(vocab.Intern({text.data() + start, pos - start}));
    }
    corpus.AddDocument(doc);
  }
  return corpus;
}

Corpus read_text_corpus(std::istream& in, bool respect_boundaries) {
  const std::string text{std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>()};
  if (in.bad()) throw ValidationError("read error on text corpus");

  Corpus corpus;
  corpus.respect_boundaries = respect_boundaries;
  Vocabulary vocab;
  std::size_t pos = 0;
  std::size_t token_start = std::string::npos;
  auto flush_token = [&](std::size_t end) {
    if (token_start != std::string::npos) {
      corpus.tokens.push_back(vocab.Intern({text.data() + token_start, end - token_start}));
      token_start = std::string::npos;
    }
  };
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == '\n') {
      flush_token(pos);
      corpus.doc_starts.push_back(corpus.tokens.size());
      ++pos;
    } else if (IsSpace(c)) {
      flush_token(pos);
      ++pos;
    } else {
      const std::size_t len = Utf8SequenceLength(text, pos);
      if (len == 0) {
        throw ValidationError(fmt::format("invalid UTF-8 at byte offset {}", pos));
      }
      if (token_start == std::string::npos) token_start = pos;
      pos += len;
    }
  }
  flush_token(pos);
  // A final line without a trailing newline is still a document.
  if (!text.empty() && text.back() != '\n') {
    corpus.doc_starts.push_back(corpus.tokens.size());
  }
  return corpus;
}

Corpus read_binary_corpus(std::istream& in, bool respect_boundaries) {
  const std::string bytes{std::istreambuf_iterator<char>(in),
                          std::istreambuf_iterator<char>()};
  if (in.bad()) throw ValidationError("read error on binary corpus");
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());

  Corpus corpus;
  corpus.respect_boundaries = respect_boundaries;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 4) {
      throw ValidationError(
          fmt::format("truncated document length at byte offset {}", pos));
    }
    const std::uint64_t length = ReadLe32(data + pos);
    const std::size_t header = pos;
    pos += 4;
    if ((bytes.size() - pos) / 4 < length) {
      throw ValidationError(fmt::format(
          "document at byte offset {} declares {} tokens but only {} bytes remain", header,
          length, bytes.size() - pos));
    }
    for (std::uint64_t i = 0; i < length; ++i, pos += 4) {
      corpus.tokens.push_back(ReadLe32(data + pos));
    }
    corpus.doc_starts.push_back(corpus.tokens.size());
  }
  return corpus;
}

std::uint64_t HashNgram(std::span<const TokenId> tokens) {
  std::uint64_t hash = kHashSeed;
  for (TokenId t : tokens) hash = Extend(hash, t);
  return hash;
}

double distinct_ngram_ratio(const Corpus& corpus, int n) {
  CheckOrder(n);
  std::vector<CountMap> counts(static_cast<std::size_t>(n));
  CountShard(corpus, n, 0, 1, counts);
  Histogram histogram;
  AddToHistogram(counts.back(), histogram);
  return StatsFromHistogram(n, histogram).ratio;
}

double ngram_entropy(const Corpus& corpus, int n) {
  CheckOrder(n);
  std::vector<CountMap> counts(static_cast<std::size_t>(n));
  CountShard(corpus, n, 0, 1, counts);
  Histogram histogram;
  AddToHistogram(counts.back(), histogram);
  return StatsFromHistogram(n, histogram).entropy_bits;
}

DiversityReport profile_corpus_serial(const Corpus& corpus, int n_max) {
  CheckOrder(n_max);
  std::vector<CountMap> counts(static_cast<std::size_t>(n_max));
  CountShard(corpus, n_max, 0, 1, counts);
  std::vector<Histogram> histograms(static_cast<std::size_t>(n_max));
  for (int n = 0; n < n_max; ++n) AddToHistogram(counts[n], histograms[n]);
  return BuildReport(corpus, n_max, histograms);
}

DiversityReport profile_corpus(const Corpus& corpus, int n_max) {
  CheckOrder(n_max);
  const int shard_count = omp_get_max_threads();
  if (shard_count <= 1) return profile_corpus_serial(corpus, n_max);

  // Each thread owns the keys congruent to its shard, so no count map is
  // ever shared or merged; only the small count histograms are combined.
  std::vector<std::vector<Histogram>> partial(
      static_cast<std::size_t>(shard_count),
      std::vector<Histogram>(static_cast<std::size_t>(n_max)));
#pragma omp parallel for schedule(static, 1) num_threads(shard_count)
  for (int shard = 0; shard < shard_count; ++shard) {
    std::vector<CountMap> counts(static_cast<std::size_t>(n_max));
    CountShard(corpus, n_max, static_cast<std::uint64_t>(shard),
               static_cast<std::uint64_t>(shard_count), counts);
    for (int n = 0; n < n_max; ++n) AddToHistogram(counts[n], partial[shard][n]);
  }
  std::vector<Histogram> histograms(static_cast<std::size_t>(n_max));
  for (const auto& shard : partial) {
    for (int n = 0; n < n_max; ++n) {
      for (const auto& [count, multiplicity] : shard[n]) histograms[n][count] += multiplicity;
    }
  }
  return BuildReport(corpus, n_max, histograms);
}

}  // namespace datascale
