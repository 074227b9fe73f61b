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

#ifndef MALCOMM_EVAL_HPP_
#define MALCOMM_EVAL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace malcomm {

// Pair taxonomy: s/d = same/different family, then same/different community.
struct PairCounts {
  std::uint64_t ss = 0;
  std::uint64_t sd = 0;
  std::uint64_t ds = 0;
  std::uint64_t dd = 0;

  std::uint64_t total() const { return ss + sd + ds + dd; }
  friend bool operator==(const PairCounts&, const PairCounts&) = default;
};

// Rows are families, columns communities, each in ascending label order.
struct ContingencyTable {
  std::vector<std::uint32_t> family_labels;
  std::vector<std::uint32_t> community_labels;
  std::vector<std::vector<std::uint64_t>> cells;
  std::uint64_t n = 0;

  // Throws ParameterError on length mismatch.
  static ContingencyTable build(std::span<const std::uint32_t> families,
                                std::span<const std::uint32_t> communities);
};

struct RandResult {
  PairCounts counts;
  double rs = 0.0;
};

// (N_ss + N_dd) / C(n, 2) from the contingency table. Requires n >= 2.
RandResult rand_statistic(std::span<const std::uint32_t> families,
                          std::span<const std::uint32_t> communities);

// Maximum-weight assignment on a rectangular non-negative matrix, padded to
// square with zeros. Returns the matched column of each row, or -1 when a
// row is matched to padding.
std::vector<int> max_weight_assignment(
    const std::vector<std::vector<std::uint64_t>>& weights);

struct AccuracyResult {
  ContingencyTable table;
  // mapping[c] = row index of the family matched to community column c,
  // or -1 when the community is unmatched.
  std::vector<int> mapping;
  std::uint64_t matched = 0;
  double accuracy = 0.0;
};

AccuracyResult accuracy(std::span<const std::uint32_t> families,
                        std::span<const std::uint32_t> communities);

// Row f, column c: share of family f's samples that landed in community c.
struct CommunityFamilyMatrix {
  std::vector<std::uint32_t> family_labels;
  std::vector<std::uint32_t> community_labels;
  std::vector<std::vector<double>> rows;
};

CommunityFamilyMatrix community_family_matrix(
    std::span<const std::uint32_t> families,
    std::span<const std::uint32_t> communities);

// Dense codes for string labels in ascending lexicographic order, so code
// order equals name order.
struct LabelCoding {
  std::vector<std::string> names;
  std::vector<std::uint32_t> codes;
};
LabelCoding encode_labels(std::span<const std::string> labels);

struct EvaluationReport {
  double rand_statistic = 0.0;
  double accuracy = 0.0;
  PairCounts pair_counts;
  std::size_t num_families = 0;
  std::size_t num_communities = 0;
  std::vector<std::string> families;          // row names
  std::vector<std::uint32_t> communities;     // column ids
  std::vector<std::pair<std::uint32_t, std::string>> mapping;  // community -> family
  std::vector<std::vector<double>> community_family_matrix;
};

EvaluationReport evaluate(std::span<const std::string> families,
                          std::span<const std::uint32_t> communities);

// eval.json document.
std::string serialize_evaluation(const EvaluationReport& r);
// Community-family matrix as TSV: header "family\tc0\tc1...", one row per
// family.
std::string serialize_matrix_tsv(const EvaluationReport& r);

}  // namespace malcomm

#endif  // MALCOMM_EVAL_HPP_
