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

#ifndef MALCOMM_KMEANS_HPP_
#define MALCOMM_KMEANS_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "malcomm/weighting.hpp"

namespace malcomm {

struct KMeansConfig {
  std::size_t c = 2;
  std::uint64_t rng_seed = 0;
  std::size_t max_iterations = 100;
  double tolerance = 1e-6;  // relative objective improvement
};

struct KMeansResult {
  std::vector<std::uint32_t> assignment;
  std::vector<std::vector<double>> centers;  // dense, over `features`
  std::vector<std::string> features;         // ascending name
  double objective = 0.0;                    // sum of squared distances
  std::size_t iterations = 0;
  std::vector<double> objective_history;     // after every Lloyd iteration
};

// Lloyd's algorithm on tf-idf vectors with k-means++ seeding. Empty clusters
// are reseeded with the point farthest from its center.
KMeansResult kmeans(const TfIdfModel& m, const KMeansConfig& cfg);

}  // namespace malcomm

#endif  // MALCOMM_KMEANS_HPP_
