// Copyright 2026 The malcomm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "malcomm/eval.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "malcomm/error.hpp"
#include "json.hpp"

using namespace malcomm;

namespace {

using Labels = std::vector<std::uint32_t>;

PairCounts brute_pairs(const Labels& p, const Labels& c) {
  PairCounts out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const bool same_p = p[i] == p[j];
      const bool same_c = c[i] == c[j];
      if (same_p && same_c) ++out.ss;
      else if (same_p) ++out.sd;
      else if (same_c) ++out.ds;
      else ++out.dd;
    }
  }
  return out;
}

// Best total over all injective maps from the smaller side into the larger side.
std::uint64_t brute_matching(const std::vector<std::vector<std::uint64_t>>& t) {
  const std::size_t rows = t.size();
  const std::size_t cols = rows ? t[0].size() : 0;
  const bool transpose = rows > cols;
  const std::size_t small = transpose ? cols : rows;
  const std::size_t large = transpose ? rows : cols;
  auto cell = [&](std::size_t s, std::size_t l) { return transpose ? t[l][s] : t[s][l]; };
  std::vector<std::size_t> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  std::uint64_t best = 0;
  do {
    std::uint64_t total = 0;
    for (std::size_t s = 0; s < small; ++s) total += cell(s, perm[s]);
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Labels random_labels(std::mt19937_64& rng, std::size_t n, std::uint32_t k) {
  Labels out(n);
  for (auto& x : out) x = static_cast<std::uint32_t>(rng() % k);
  return out;
}

}  // namespace

TEST_CASE("rand statistic examples") {
  const RandResult r = rand_statistic(Labels{1, 1, 2, 2}, Labels{1, 1, 1, 2});
  CHECK(r.counts == PairCounts{1, 1, 2, 2});
  CHECK(r.rs == 0.5);
  CHECK(rand_statistic(Labels{1, 1, 2, 3}, Labels{9, 9, 4, 0}).rs == 1.0);
  CHECK(rand_statistic(Labels{0, 0, 0}, Labels{0, 1, 2}).rs == 0.0);
  CHECK_THROWS_AS(rand_statistic(Labels{1}, Labels{1}), ParameterError);
  CHECK_THROWS_AS(rand_statistic(Labels{1, 2}, Labels{1}), ParameterError);
}

TEST_CASE("rand statistic equals brute-force pair counting") {
  std::mt19937_64 rng(500);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng() % 199;
    const Labels p = random_labels(rng, n, 1 + rng() % 12);
    const Labels c = random_labels(rng, n, 1 + rng() % 12);
    const PairCounts want = brute_pairs(p, c);
    const RandResult got = rand_statistic(p, c);
    REQUIRE(got.counts == want);
    REQUIRE(got.rs == static_cast<double>(want.ss + want.dd) / static_cast<double>(want.total()));
  }
}

TEST_CASE("accuracy examples") {
  const AccuracyResult a = accuracy(Labels{0, 0, 1, 1}, Labels{1, 1, 1, 2});
  CHECK(a.accuracy == 0.75);
  CHECK(a.matched == 3);
  CHECK(a.mapping == std::vector<int>{0, 1});
  CHECK(accuracy(Labels{3, 3, 5}, Labels{3, 3, 5}).accuracy == 1.0);
  CHECK(accuracy(Labels{0, 0, 0}, Labels{1, 2, 3}).accuracy == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(accuracy(Labels{}, Labels{}), ParameterError);
  CHECK_THROWS_AS(accuracy(Labels{0}, Labels{0, 1}), ParameterError);
}

TEST_CASE("hungarian matching equals brute force on small tables") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t rows = 1 + rng() % 7;
    const std::size_t cols = 1 + rng() % 7;
    std::vector<std::vector<std::uint64_t>> t(rows, std::vector<std::uint64_t>(cols));
    for (auto& row : t) {
      for (auto& x : row) x = rng() % 20;
    }
    const auto assign = max_weight_assignment(t);
    std::uint64_t total = 0;
    std::vector<char> used(cols, 0);
    for (std::size_t r = 0; r < rows; ++r) {
      if (assign[r] < 0) continue;
      REQUIRE(!used[static_cast<std::size_t>(assign[r])]);
      used[static_cast<std::size_t>(assign[r])] = 1;
      total += t[r][static_cast<std::size_t>(assign[r])];
    }
    REQUIRE(total == brute_matching(t));
  }
}

TEST_CASE("accuracy properties") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 100;
    const Labels p = random_labels(rng, n, 1 + rng() % 6);
    const Labels c = random_labels(rng, n, 1 + rng() % 6);
    const AccuracyResult a = accuracy(p, c);
    REQUIRE(a.matched == brute_matching(a.table.cells));
    std::uint64_t max_cell = 0;
    for (const auto& row : a.table.cells) {
      for (auto x : row) max_cell = std::max(max_cell, x);
    }
    CHECK(a.accuracy >= static_cast<double>(max_cell) / static_cast<double>(n));
    CHECK(a.accuracy <= 1.0);
    // Renaming communities does not change the score.
    Labels renamed = c;
    for (auto& x : renamed) x = 1000 - x * 7;
    CHECK(accuracy(p, renamed).accuracy == a.accuracy);
    if (n >= 2) CHECK(rand_statistic(p, renamed).rs == rand_statistic(p, c).rs);
  }
}

TEST_CASE("community-family matrix") {
  const auto m = community_family_matrix(Labels{0, 0, 1, 1}, Labels{1, 1, 1, 2});
  REQUIRE(m.rows.size() == 2);
  CHECK(m.rows[0] == std::vector<double>{1.0, 0.0});
  CHECK(m.rows[1] == std::vector<double>{0.5, 0.5});
  const auto unit = community_family_matrix(Labels{0, 1, 2}, Labels{5, 5, 6});
  for (const auto& row : unit.rows) {
    CHECK(std::count(row.begin(), row.end(), 1.0) == 1);
    CHECK(std::accumulate(row.begin(), row.end(), 0.0) == 1.0);
  }
}

TEST_CASE("evaluation report") {
  const std::vector<std::string> families = {"a", "a", "b", "b"};
  const EvaluationReport r = evaluate(families, Labels{1, 1, 1, 2});
  CHECK(r.rand_statistic == 0.5);
  CHECK(r.accuracy == 0.75);
  CHECK(r.num_families == 2);
  CHECK(r.num_communities == 2);
  CHECK(r.mapping ==
        std::vector<std::pair<std::uint32_t, std::string>>{{1, "a"}, {2, "b"}});
  const auto json = nlohmann::json::parse(serialize_evaluation(r));
  CHECK(json["rs"] == 0.5);
  CHECK(json["accuracy"] == 0.75);
  CHECK(json["pair_counts"]["ds"] == 2);
  CHECK(json["mapping"] == nlohmann::json{{"1", "a"}, {"2", "b"}});
  CHECK(json["community_family_matrix"]["rows"][1][0] == 0.5);
  const std::string tsv = serialize_matrix_tsv(r);
  CHECK(tsv.find("a\t1\t0") != std::string::npos);
  CHECK(tsv.find("b\t0.5\t0.5") != std::string::npos);

  const LabelCoding coding = encode_labels(std::vector<std::string>{"z", "a", "z"});
  CHECK(coding.names == std::vector<std::string>{"a", "z"});
  CHECK(coding.codes == Labels{1, 0, 1});
}
