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

#ifndef MALCOMM_WEIGHTING_HPP_
#define MALCOMM_WEIGHTING_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "malcomm/dataset.hpp"

namespace malcomm {

// tf-idf importance of every (feature, sample) pair:
//   tfidf = tf * ln(n / s_m)
// with tf the stored feature value and s_m the document frequency. Zero
// products (features present in every sample) are not stored.
struct TfIdfModel {
  std::size_t n = 0;
  std::vector<std::string> ids;
  std::map<std::string, std::size_t, std::less<>> doc_freq;
  std::vector<FeatureMap> values;  // one per sample, in dataset order
};

TfIdfModel compute_tfidf(const Dataset& d);

// JSON Lines dump: {"id":...,"tfidf":{feature:value}} with 10 significant
// digits.
std::string serialize_tfidf(const TfIdfModel& m);

struct Neighbor {
  std::uint32_t vertex;
  double weight;
};

struct PairWeight {
  std::uint32_t i;
  std::uint32_t j;
  double weight;
};

// Symmetric sparse pairwise weights. Only strictly positive weights are
// stored; each vertex keeps its neighbors sorted by vertex index.
class WeightSet {
 public:
  WeightSet() = default;
  explicit WeightSet(std::size_t num_vertices) : adj_(num_vertices) {}

  // Builds from unordered pairs. Non-positive weights are dropped. Throws
  // ParameterError on self-pairs, out-of-range or repeated pairs.
  static WeightSet from_pairs(std::size_t num_vertices,
                              std::span<const PairWeight> pairs);
  // Rows hold neighbors j > i only, ascending.
  static WeightSet from_upper_rows(std::vector<std::vector<Neighbor>> rows);

  std::size_t num_vertices() const { return adj_.size(); }
  // Number of stored pairs |W|.
  std::size_t size() const { return num_pairs_; }
  bool empty() const { return num_pairs_ == 0; }

  // 0 when the pair is absent.
  double weight(std::uint32_t i, std::uint32_t j) const;
  std::span<const Neighbor> neighbors(std::uint32_t i) const { return adj_[i]; }
  double min_positive() const;
  double max_weight() const;

  // Visits each stored pair once with i < j, ascending by (i, j).
  template <typename Fn>
  void for_each_pair(Fn&& fn) const {
    for (std::uint32_t i = 0; i < adj_.size(); ++i) {
      for (const Neighbor& nb : adj_[i]) {
        if (nb.vertex > i) fn(i, nb.vertex, nb.weight);
      }
    }
  }

 private:
  std::vector<std::vector<Neighbor>> adj_;
  std::size_t num_pairs_ = 0;
};

// w_ij = sum over shared features k of (tfidf_ki + tfidf_kj) / 2, summed in
// ascending feature-name order. Computed through an inverted index; the
// result does not depend on `threads`.
WeightSet pairwise_weights(const TfIdfModel& m, int threads = 1);

struct FamilySimilarityMatrix {
  std::vector<std::string> families;      // sorted
  std::vector<std::vector<double>> matrix;
};

// Mean pair weight between (and, on the diagonal, within) families.
// Absent weights count as 0; a single-member family has diagonal 0.
FamilySimilarityMatrix family_similarity(const Dataset& d, const WeightSet& w);
std::string serialize_family_similarity(const FamilySimilarityMatrix& m);

struct FeatureFrequency {
  std::string feature;
  std::size_t count;
  double fraction;
};

// Most frequent features, descending by fraction, ties by name.
std::vector<FeatureFrequency> feature_frequency(const Dataset& d,
                                                std::size_t top);

}  // namespace malcomm

#endif  // MALCOMM_WEIGHTING_HPP_
