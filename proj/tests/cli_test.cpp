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

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "datascale/diversity.hpp"
#include "doctest.h"
#include "support.hpp"

namespace datascale {
namespace {

using testing::ParseCsv;
using testing::CommandResult;
using testing::RunCli;

// Splits `text` at the first blank line.
std::pair<std::string, std::string> SplitTables(const std::string& text) {
  const auto pos = text.find("\n\n");
  if (pos == std::string::npos) return {text, ""};
  return {text.substr(0, pos + 1), text.substr(pos + 2)};
}

std::string Simulated(const std::string& name, const std::string& flags) {
  const std::string path = testing::TempPath(name).string();
  REQUIRE(RunCli("simulate " + flags + " --out " + path).exit_code == 0);
  return path;
}

TEST_CASE("simulate is deterministic and loads under fit") {
  const std::string a = Simulated("cli_a.json", "--scenario rank-flip --seed 7");
  const std::string b = Simulated("cli_b.json", "--scenario rank-flip --seed 7");
  CHECK(testing::ReadText(a) == testing::ReadText(b));
  CHECK(RunCli("simulate --scenario rank-flip --seed 7").out == testing::ReadText(a));
  CHECK(RunCli("fit --manifest " + a).exit_code == 0);
}

TEST_CASE("noiseless fit recovers the configured truth") {
  const std::string path = Simulated(
      "cli_truth.json", "--scenario custom --source alpha:-0.3:0.008 --source beta:0.2:-0.002 --noise 0");
  const CommandResult r = RunCli("fit --manifest " + path);
  REQUIRE(r.exit_code == 0);
  const auto [fits, points] = SplitTables(r.out);
  const auto rows = ParseCsv(fits);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == "source_id");
  CHECK(rows[1][0] == "alpha");
  CHECK(std::stod(rows[1][1]) == doctest::Approx(-0.3).epsilon(1e-9));
  CHECK(std::stod(rows[1][2]) == doctest::Approx(0.008).epsilon(1e-9));
  CHECK(std::stod(rows[2][1]) == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(std::stod(rows[2][2]) == doctest::Approx(-0.002).epsilon(1e-9));
  CHECK(ParseCsv(points).size() == 13);
}

TEST_CASE("basis changes compute but not delta") {
  const std::string path = Simulated("cli_basis.json", "--scenario rank-flip --seed 3");
  const auto total = ParseCsv(SplitTables(RunCli("fit --manifest " + path + " --basis total").out).second);
  const auto curation =
      ParseCsv(SplitTables(RunCli("fit --manifest " + path + " --basis curation-only").out).second);
  REQUIRE(total.size() == curation.size());
  REQUIRE(total.size() == 13);
  for (std::size_t i = 1; i < total.size(); ++i) {
    CHECK(total[i][4] == curation[i][4]);
    CHECK(std::stod(total[i][2]) > std::stod(curation[i][2]));
  }
}

TEST_CASE("malformed manifest fails without partial output") {
  const auto path = testing::TempPath("cli_bad.json");
  testing::WriteText(path, "{\"baseline_id\": ");
  const std::string out = testing::TempPath("cli_bad_out.csv").string();
  std::filesystem::remove(out);
  const CommandResult r = RunCli("fit --manifest " + path.string() + " --out " + out);
  CHECK(r.exit_code == 1);
  CHECK(r.out.empty());
  CHECK_FALSE(std::filesystem::exists(out));
  CHECK(RunCli("fit --manifest /nonexistent.json").exit_code == 1);
  CHECK(RunCli("fit").exit_code == 1);
  CHECK(RunCli("frobnicate").exit_code == 1);
}

TEST_CASE("rank follows the crossover") {
  const std::string path = Simulated("cli_rank.json", "--scenario rank-flip --seed 7 --noise 0");
  const auto cross = ParseCsv(RunCli("crossover --manifest " + path).out);
  REQUIRE(cross.size() == 2);
  CHECK(cross[1][5] == "true");
  const double c_star = std::stod(cross[1][2]);
  const auto small = ParseCsv(RunCli("rank --manifest " + path + " --budget " +
                                     std::to_string(c_star / 2)).out);
  const auto large = ParseCsv(RunCli("rank --manifest " + path + " --budget " +
                                     std::to_string(c_star * 2)).out);
  CHECK(small[1][1] == "wrap_like");
  CHECK(large[1][1] == "mbf_like");
  CHECK(RunCli("rank --manifest " + path + " --budget -1").exit_code == 1);

  const std::string single = Simulated("cli_single.json", "--scenario custom --source only:0:0.01");
  const auto one = ParseCsv(RunCli("rank --manifest " + single + " --budget 1e21").out);
  REQUIRE(one.size() == 2);
  CHECK(one[1][1] == "only");
}

TEST_CASE("allocate") {
  const std::string two =
      Simulated("cli_alloc.json", "--scenario custom --source p:-0.4:0.01 --source q:-0.2:0.005");
  const CommandResult r = RunCli("allocate --manifest " + two + " --c-max 3e21 --with-oracle");
  REQUIRE(r.exit_code == 0);
  const auto [plan, summary] = SplitTables(r.out);
  const auto rows = ParseCsv(plan);
  REQUIRE(rows.size() == 3);
  CHECK(std::stod(rows[1][1]) == doctest::Approx(2e21).epsilon(1e-9));
  CHECK(std::stod(rows[2][1]) == doctest::Approx(1e21).epsilon(1e-9));
  const auto sums = ParseCsv(summary);
  REQUIRE(sums.size() == 2);
  CHECK(sums[0][3] == "utility_gap");
  CHECK(std::stod(sums[1][3]) <= 0.0);

  const std::string flip = Simulated("cli_alloc_flip.json", "--scenario rank-flip --seed 7");
  const auto flip_summary =
      ParseCsv(SplitTables(RunCli("allocate --manifest " + flip + " --c-max 1e21 --with-oracle").out).second);
  CHECK(std::stod(flip_summary[1][3]) <= 0.0);

  const std::string negative =
      Simulated("cli_alloc_neg.json", "--scenario custom --source m:0.5:-0.01 --source n:0.6:-0.01");
  const auto fallback = ParseCsv(SplitTables(RunCli("allocate --manifest " + negative + " --c-max 1e21").out).first);
  REQUIRE(fallback.size() == 3);
  CHECK(fallback[1][0] == "m");
  CHECK(fallback[1][3] == "excluded");
  CHECK(fallback[2][3] == "included");
  CHECK(std::stod(fallback[2][1]) == 1e21);
}

TEST_CASE("cost") {
  const auto tinygsm = ParseCsv(RunCli("cost --preset tinygsm --tokens 1.8e9").out);
  REQUIRE(tinygsm.size() == 2);
  CHECK(std::stod(tinygsm[1][6]) == doctest::Approx(6.3e20).epsilon(1e-12));

  const auto zero = ParseCsv(RunCli("cost --zero-cost --basis curation-only --steps 1000").out);
  CHECK(zero[1][6] == "0");

  const auto total = ParseCsv(
      RunCli("cost --kind rephrase --generator-params 3e9 --expansion-factor 1.2355 "
             "--mbf-recall 22 --annotator-params 1e8 --training-params 7e9 --steps 9000 "
             "--basis total").out);
  REQUIRE(total.size() == 2);
  CHECK(std::stod(total[1][4]) + std::stod(total[1][5]) ==
        doctest::Approx(std::stod(total[1][6])).epsilon(1e-15));

  CHECK(RunCli("cost --kind synthetic --expansion-factor 2 --steps 10").exit_code == 1);
  CHECK(RunCli("cost --kind mbf --steps 10 --basis total").exit_code == 1);
  CHECK(RunCli("cost --kind mbf --steps 10 --tokens 5").exit_code == 1);
}

TEST_CASE("diversity") {
  const auto path = testing::TempPath("cli_corpus.txt");
  testing::WriteText(path, "a a a a\n");
  const auto rows = ParseCsv(RunCli("diversity " + path.string() + " --n-max 2").out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1] == std::vector<std::string>{"1", "1", "4", "0.25", "0"});
  CHECK(rows[2] == std::vector<std::string>{"2", "1", "3", "0.3333333333333333", "0"});

  const auto empty = testing::TempPath("cli_empty.txt");
  testing::WriteText(empty, "");
  const auto zero = ParseCsv(RunCli("diversity " + empty.string() + " --n-max 2").out);
  REQUIRE(zero.size() == 3);
  CHECK(zero[1] == std::vector<std::string>{"1", "0", "0", "1", "0"});

  const auto bad = testing::TempPath("cli_bad.txt");
  testing::WriteText(bad, std::string("ok\n\xc3", 4));
  CHECK(RunCli("diversity " + bad.string()).exit_code == 1);
  CHECK(RunCli("diversity /nonexistent.txt").exit_code == 1);

  // Matches the library on a random corpus.
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> word(0, 9);
  std::string text;
  for (int i = 0; i < 2000; ++i) text += "w" + std::to_string(word(rng)) + (i % 50 == 49 ? "\n" : " ");
  const auto random = testing::TempPath("cli_random.txt");
  testing::WriteText(random, text);
  std::istringstream in(text);
  const DiversityReport report = profile_corpus(read_text_corpus(in), 3);
  const auto cli = ParseCsv(RunCli("diversity " + random.string() + " --n-max 3").out);
  REQUIRE(cli.size() == 4);
  for (int n = 1; n <= 3; ++n) {
    CHECK(std::stoull(cli[n][1]) == report.per_n[n - 1].distinct);
    CHECK(std::stoull(cli[n][2]) == report.per_n[n - 1].total);
    CHECK(std::stod(cli[n][4]) == report.per_n[n - 1].entropy_bits);
  }
}

TEST_CASE("svg output") {
  const std::string path = Simulated("cli_svg.json", "--scenario rank-flip --seed 1");
  const auto svg = testing::TempPath("cli_plot.svg");
  std::filesystem::remove(svg);
  CHECK(RunCli("fit --manifest " + path + " --svg " + svg.string()).exit_code == 0);
  CHECK(testing::ReadText(svg).find("</svg>") != std::string::npos);
}

}  // namespace
}  // namespace datascale
