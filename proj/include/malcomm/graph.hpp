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

#ifndef MALCOMM_GRAPH_HPP_
#define MALCOMM_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "malcomm/weighting.hpp"

namespace malcomm {

enum class GraphMethod { kEpsilon, kKnn, kEn };

GraphMethod parse_graph_method(std::string_view token);
std::string graph_method_name(GraphMethod m);

struct Edge {
  std::uint32_t u;  // u < v
  std::uint32_t v;
  double weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected weighted graph G = (V, E, W): no self-loops, no duplicate
// edges, all weights > 0. Immutable once built.
class RelationGraph {
 public:
  RelationGraph() = default;
  // Throws ParameterError on self-loops, duplicates, out-of-range endpoints
  // or non-positive weights.
  RelationGraph(std::vector<std::string> vertices, std::vector<Edge> edges);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }  // sorted (u, v)
  std::span<const Neighbor> neighbors(std::uint32_t v) const { return adj_[v]; }
  std::size_t degree(std::uint32_t v) const { return adj_[v].size(); }
  double strength(std::uint32_t v) const;
  double total_weight() const;
  std::size_t num_isolated() const;
  bool has_edge(std::uint32_t u, std::uint32_t v) const;

 private:
  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adj_;
};

struct Cutoff {
  double epsilon;
  std::size_t rank;  // m = ceil(p / 100 * |W|)
};

// epsilon is the m-th largest stored weight, located by selection.
Cutoff percentile_cutoff(const WeightSet& w, double p);

enum class Threshold {
  kAtLeast,   // w >= epsilon, used with percentile-derived thresholds
  kGreater,   // w > epsilon, used with an explicit threshold
};

RelationGraph build_epsilon(const WeightSet& w,
                            std::span<const std::string> vertices,
                            double epsilon,
                            Threshold rule = Threshold::kAtLeast);

enum class NeighborSelection {
  kFullSort,  // sorts every vertex's whole candidate row
  kPartial,   // partial selection of the k best
};

// Weight given to a fallback edge whose true weight is 0.
double floor_weight(const WeightSet& w);

// The k best neighbors of v: weight descending, ties by ascending sample id.
// Absent pairs are candidates with weight 0.
std::vector<std::uint32_t> nearest_neighbors(
    const WeightSet& w, std::span<const std::uint32_t> id_rank,
    std::uint32_t v, std::size_t k, NeighborSelection how);

// Rank of each vertex id in lexicographic order.
std::vector<std::uint32_t> id_ranks(std::span<const std::string> vertices);

RelationGraph build_knn(const WeightSet& w,
                        std::span<const std::string> vertices, std::size_t k,
                        NeighborSelection how = NeighborSelection::kFullSort,
                        int threads = 1);

struct EnBuildStats {
  Cutoff cutoff{0.0, 0};
  std::size_t epsilon_edges = 0;
  std::size_t isolated_before_fallback = 0;
  std::size_t fallback_edges = 0;
};

// Epsilon graph at the p-th percentile, then k-NN edges for every vertex
// the first step left isolated.
RelationGraph build_en(const WeightSet& w, std::span<const std::string> vertices,
                       double p, std::size_t k, EnBuildStats* stats = nullptr,
                       int threads = 1);

struct GraphBuildParams {
  GraphMethod method = GraphMethod::kEn;
  double p = 10.0;
  std::size_t k = 1;
  std::optional<double> epsilon;  // overrides p when set
  int threads = 1;
};

struct GraphBuildResult {
  RelationGraph graph;
  std::size_t isolated_before_fallback = 0;
  std::optional<Cutoff> cutoff;
};

// Validates params and dispatches to the builder for params.method.
GraphBuildResult build_graph(const WeightSet& w,
                             std::span<const std::string> vertices,
                             const GraphBuildParams& params);

// Edge-list TSV: "# vertices: n" header, then "src\tdst\tweight" per edge
// with src < dst lexicographically. With `list_isolated`, vertices without
// edges are emitted as "id\t\t0".
std::string serialize_edge_list(const RelationGraph& g, bool list_isolated);
RelationGraph parse_edge_list(std::string_view text);

}  // namespace malcomm

#endif  // MALCOMM_GRAPH_HPP_
