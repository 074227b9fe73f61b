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

// Small graphs and random generators shared by the test binaries.

#ifndef MALCOMM_TESTS_FIXTURES_HPP_
#define MALCOMM_TESTS_FIXTURES_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "malcomm/graph.hpp"

namespace malcomm::testing {

inline std::vector<std::string> numbered_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 1; i <= n; ++i) ids.push_back(std::to_string(i));
  return ids;
}

// Triangles {1,2,3} and {4,5,6} joined by the bridge 3-4, unit weights.
inline RelationGraph barbell() {
  return RelationGraph(numbered_ids(6), {{0, 1, 1.0},
                                         {0, 2, 1.0},
                                         {1, 2, 1.0},
                                         {3, 4, 1.0},
                                         {3, 5, 1.0},
                                         {4, 5, 1.0},
                                         {2, 3, 1.0}});
}

inline RelationGraph triangle() {
  return RelationGraph(numbered_ids(3), {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
}

inline RelationGraph single_edge() {
  return RelationGraph({"a", "b"}, {{0, 1, 1.0}});
}

// Two 4-cliques joined by one edge.
inline RelationGraph two_cliques() {
  std::vector<Edge> edges;
  for (std::uint32_t base : {0u, 4u}) {
    for (std::uint32_t i = 0; i < 4; ++i) {
      for (std::uint32_t j = i + 1; j < 4; ++j) edges.push_back({base + i, base + j, 1.0});
    }
  }
  edges.push_back({3, 4, 1.0});
  return RelationGraph(numbered_ids(8), edges);
}

// Random weighted graph with at least one edge.
inline RelationGraph random_graph(std::mt19937_64& rng, std::size_t n, double density) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (unit(rng) < density) edges.push_back({i, j, 0.1 + 4.9 * unit(rng)});
    }
  }
  if (edges.empty()) edges.push_back({0, 1, 1.0});
  return RelationGraph(numbered_ids(n), edges);
}

}  // namespace malcomm::testing

#endif  // MALCOMM_TESTS_FIXTURES_HPP_
