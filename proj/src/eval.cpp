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
#include <limits>
#include <map>

#include "json.hpp"
#include "malcomm/error.hpp"
#include "malcomm/text_format.hpp"

namespace malcomm {

namespace {

std::uint64_t choose2(std::uint64_t x) { return x * (x - (x > 0 ? 1 : 0)) / 2; }

std::vector<std::uint32_t> sorted_unique(std::span<const std::uint32_t> labels) {
  std::vector<std::uint32_t> out(labels.begin(), labels.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t position(const std::vector<std::uint32_t>& sorted, std::uint32_t x) {
  return static_cast<std::size_t>(
      std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

}  // namespace

ContingencyTable ContingencyTable::build(std::span<const std::uint32_t> families,
                                         std::span<const std::uint32_t> communities) {
  if (families.size() != communities.size()) {
    throw ParameterError("label sequences differ in length (" +
                         std::to_string(families.size()) + " vs " +
                         std::to_string(communities.size()) + ")");
  }
  ContingencyTable t;
  t.family_labels = sorted_unique(families);
  t.community_labels = sorted_unique(communities);
  t.cells.assign(t.family_labels.size(),
                 std::vector<std::uint64_t>(t.community_labels.size(), 0));
  for (std::size_t i = 0; i < families.size(); ++i) {
    ++t.cells[position(t.family_labels, families[i])]
             [position(t.community_labels, communities[i])];
  }
  t.n = families.size();
  return t;
}

RandResult rand_statistic(std::span<const std::uint32_t> families,
                          std::span<const std::uint32_t> communities) {
  const ContingencyTable t = ContingencyTable::build(families, communities);
  if (t.n < 2) throw ParameterError("rand statistic needs at least 2 samples");
  std::uint64_t same_both = 0;
  std::uint64_t same_family = 0;
  std::vector<std::uint64_t> col_sum(t.community_labels.size(), 0);
  for (const auto& row : t.cells) {
    std::uint64_t row_sum = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      same_both += choose2(row[c]);
      row_sum += row[c];
      col_sum[c] += row[c];
    }
    same_family += choose2(row_sum);
  }
  std::uint64_t same_community = 0;
  for (std::uint64_t s : col_sum) same_community += choose2(s);

  RandResult r;
  r.counts.ss = same_both;
  r.counts.sd = same_family - same_both;
  r.counts.ds = same_community - same_both;
  r.counts.dd = choose2(t.n) - r.counts.ss - r.counts.sd - r.counts.ds;
  r.rs = static_cast<double>(r.counts.ss + r.counts.dd) /
         static_cast<double>(choose2(t.n));
  return r;
}

std::vector<int> max_weight_assignment(
    const std::vector<std::vector<std::uint64_t>>& weights) {
  const std::size_t rows = weights.size();
  const std::size_t cols = rows > 0 ? weights[0].size() : 0;
  const std::size_t n = std::max(rows, cols);
  if (n == 0) return {};
  std::uint64_t top = 0;
  for (const auto& r : weights) {
    for (std::uint64_t x : r) top = std::max(top, x);
  }
  // Minimize (top - weight); padding cells have weight 0.
  const auto cost = [&](std::size_t i, std::size_t j) -> std::int64_t {
    const std::uint64_t w = i < rows && j < cols ? weights[i][j] : 0;
    return static_cast<std::int64_t>(top - w);
  };
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  // Potentials with 1-based indices; column 0 is a sentinel.
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<std::int64_t> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      std::int64_t delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(rows, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = match[j] - 1;
    if (i < rows && j - 1 < cols) row_to_col[i] = static_cast<int>(j - 1);
  }
  return row_to_col;
}

AccuracyResult accuracy(std::span<const std::uint32_t> families,
                        std::span<const std::uint32_t> communities) {
  AccuracyResult r;
  r.table = ContingencyTable::build(families, communities);
  if (r.table.n == 0) throw ParameterError("accuracy of an empty labeling");
  const auto row_to_col = max_weight_assignment(r.table.cells);
  r.mapping.assign(r.table.community_labels.size(), -1);
  for (std::size_t f = 0; f < row_to_col.size(); ++f) {
    if (row_to_col[f] < 0) continue;
    r.mapping[static_cast<std::size_t>(row_to_col[f])] = static_cast<int>(f);
    r.matched += r.table.cells[f][static_cast<std::size_t>(row_to_col[f])];
  }
  r.accuracy = static_cast<double>(r.matched) / static_cast<double>(r.table.n);
  return r;
}

CommunityFamilyMatrix community_family_matrix(
    std::span<const std::uint32_t> families,
    std::span<const std::uint32_t> communities) {
  const ContingencyTable t = ContingencyTable::build(families, communities);
  CommunityFamilyMatrix m;
  m.family_labels = t.family_labels;
  m.community_labels = t.community_labels;
  for (const auto& row : t.cells) {
    std::uint64_t total = 0;
    for (std::uint64_t x : row) total += x;
    std::vector<double> out(row.size(), 0.0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      out[c] = static_cast<double>(row[c]) / static_cast<double>(total);
    }
    m.rows.push_back(std::move(out));
  }
  return m;
}

LabelCoding encode_labels(std::span<const std::string> labels) {
  LabelCoding lc;
  lc.names.assign(labels.begin(), labels.end());
  std::sort(lc.names.begin(), lc.names.end());
  lc.names.erase(std::unique(lc.names.begin(), lc.names.end()), lc.names.end());
  lc.codes.reserve(labels.size());
  for (const auto& s : labels) {
    lc.codes.push_back(static_cast<std::uint32_t>(
        std::lower_bound(lc.names.begin(), lc.names.end(), s) - lc.names.begin()));
  }
  return lc;
}

EvaluationReport evaluate(std::span<const std::string> families,
                          std::span<const std::uint32_t> communities) {
  const LabelCoding coding = encode_labels(families);
  const RandResult rand = rand_statistic(coding.codes, communities);
  const AccuracyResult acc = accuracy(coding.codes, communities);
  const CommunityFamilyMatrix cfm = community_family_matrix(coding.codes, communities);

  EvaluationReport r;
  r.rand_statistic = rand.rs;
  r.pair_counts = rand.counts;
  r.accuracy = acc.accuracy;
  r.num_families = coding.names.size();
  r.num_communities = acc.table.community_labels.size();
  r.families = coding.names;
  r.communities = acc.table.community_labels;
  for (std::size_t c = 0; c < acc.mapping.size(); ++c) {
    if (acc.mapping[c] < 0) continue;
    r.mapping.emplace_back(acc.table.community_labels[c],
                           coding.names[acc.table.family_labels[static_cast<std::size_t>(
                               acc.mapping[c])]]);
  }
  r.community_family_matrix = cfm.rows;
  return r;
}

std::string serialize_evaluation(const EvaluationReport& r) {
  nlohmann::ordered_json j;
  j["rs"] = r.rand_statistic;
  j["accuracy"] = r.accuracy;
  j["num_families"] = r.num_families;
  j["num_communities"] = r.num_communities;
  j["pair_counts"] = {{"ss", r.pair_counts.ss},
                      {"sd", r.pair_counts.sd},
                      {"ds", r.pair_counts.ds},
                      {"dd", r.pair_counts.dd}};
  nlohmann::ordered_json mapping = nlohmann::ordered_json::object();
  for (const auto& [c, f] : r.mapping) mapping[std::to_string(c)] = f;
  j["mapping"] = mapping;
  j["community_family_matrix"] = {{"families", r.families},
                                  {"communities", r.communities},
                                  {"rows", r.community_family_matrix}};
  return j.dump(2) + "\n";
}

std::string serialize_matrix_tsv(const EvaluationReport& r) {
  std::string out = "family";
  for (std::uint32_t c : r.communities) out += "\tc" + std::to_string(c);
  out += '\n';
  for (std::size_t f = 0; f < r.families.size(); ++f) {
    out += r.families[f];
    for (double x : r.community_family_matrix[f]) out += '\t' + format_sig10(x);
    out += '\n';
  }
  return out;
}

}  // namespace malcomm
