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

// Shared helpers and independent oracles for the test suites. Nothing here
// calls into the code paths it is used to check.

#ifndef DATASCALE_TESTS_SUPPORT_HPP_
#define DATASCALE_TESTS_SUPPORT_HPP_

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace datascale::testing {

inline bool RelClose(double actual, double expected, double rel) {
  if (expected == 0.0) return std::abs(actual) <= rel;
  return std::abs(actual - expected) <= rel * std::abs(expected);
}

struct CommandResult {
  int exit_code = -1;
  std::string out;
};

// Runs `args` through the shell with the CLI binary prepended; stdout only.
inline CommandResult RunCli(const std::string& args) {
  const std::string command = std::string(DATASCALE_CLI) + " " + args + " 2>/dev/null";
  CommandResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  std::array<char, 4096> buffer{};
  std::size_t n;
  while ((n = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.out.append(buffer.data(), n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

inline std::filesystem::path TempPath(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "datascale_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

inline void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline std::vector<std::vector<std::string>> ParseCsv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      rows.emplace_back();
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.emplace_back();
    rows.push_back(std::move(fields));
  }
  return rows;
}

// Direct sum of squared differences against a one-hot target.
inline double BruteForceBrier(const std::vector<double>& p, std::size_t correct) {
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double y = k == correct ? 1.0 : 0.0;
    total += (p[k] - y) * (p[k] - y);
  }
  return total;
}

// Exact n-gram counts keyed by the token tuple itself.
inline std::map<std::vector<std::uint32_t>, std::uint64_t> ExactNgramCounts(
    const std::vector<std::vector<std::uint32_t>>& documents, int n, bool boundaries) {
  std::vector<std::vector<std::uint32_t>> streams;
  if (boundaries) {
    streams = documents;
  } else {
    streams.emplace_back();
    for (const auto& d : documents) streams.back().insert(streams.back().end(), d.begin(), d.end());
  }
  std::map<std::vector<std::uint32_t>, std::uint64_t> counts;
  for (const auto& s : streams) {
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= s.size(); ++i) {
      ++counts[std::vector<std::uint32_t>(s.begin() + i, s.begin() + i + n)];
    }
  }
  return counts;
}

inline double ExactEntropyBits(const std::map<std::vector<std::uint32_t>, std::uint64_t>& counts) {
  double total = 0.0;
  for (const auto& [k, c] : counts) total += static_cast<double>(c);
  double h = 0.0;
  for (const auto& [k, c] : counts) {
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

// Bisection on f over [ln lo, ln hi] in log-compute; requires a sign change.
inline double BisectLogCompute(const std::function<double(double)>& f, double lo, double hi) {
  double a = std::log(lo);
  double b = std::log(hi);
  double fa = f(a);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return std::exp(0.5 * (a + b));
}

inline std::vector<double> RandomSimplex(std::mt19937_64& rng, std::size_t k) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(k);
  double s = 0.0;
  for (double& x : p) s += (x = e(rng));
  for (double& x : p) x /= s;
  return p;
}

}  // namespace datascale::testing

#endif  // DATASCALE_TESTS_SUPPORT_HPP_
