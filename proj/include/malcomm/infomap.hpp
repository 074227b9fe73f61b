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

#ifndef MALCOMM_INFOMAP_HPP_
#define MALCOMM_INFOMAP_HPP_

// Two-level map equation on undirected weighted graphs.
//
// Flow is the stationary distribution of an unbiased random walk with no
// teleportation: vertex visit rate p = strength / (2 W). For a partition
// into modules with exit rates q_i and flow sums f_i,
//
//   L = q H(Q) + sum_i p_i H(P^i),     q = sum_i q_i,  p_i = q_i + f_i
//
// which expands to
//
//   L = plogp(q) - 2 sum_i plogp(q_i) - sum_a plogp(p_a) + sum_i plogp(p_i)
//
// with plogp(x) = x log2 x. All codelengths are in bits.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "malcomm/graph.hpp"

namespace malcomm {

double plogp(double x);

// Entropy in bits of a distribution given as non-negative weights;
// the weights are normalized by their sum. 0 log 0 = 0.
double entropy_bits(std::span<const double> weights);

struct FlowModel {
  double total_weight = 0.0;
  std::vector<double> visit_rate;
};

// Throws ParameterError for a graph with >= 2 vertices and no weight. A lone
// vertex gets visit rate 1.
FlowModel compute_flows(const RelationGraph& g);

// Dense community ids 0..m-1, numbered by first appearance in vertex order.
class Partition {
 public:
  Partition() = default;
  // Any labels; they are renumbered canonically.
  static Partition from_labels(std::span<const std::uint32_t> labels);
  static Partition singletons(std::size_t n);
  static Partition whole(std::size_t n);

  std::size_t size() const { return assignment_.size(); }
  std::uint32_t num_modules() const { return num_modules_; }
  std::uint32_t operator[](std::size_t v) const { return assignment_[v]; }
  const std::vector<std::uint32_t>& assignment() const { return assignment_; }
  std::vector<std::vector<std::uint32_t>> members() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::uint32_t> assignment_;
  std::uint32_t num_modules_ = 0;
};

struct MapEquationBreakdown {
  std::vector<double> exit_rate;       // q_i
  double exit_total = 0.0;             // q
  double index_entropy = 0.0;          // H(Q)
  std::vector<double> module_usage;    // p_i = q_i + sum of member visit rates
  std::vector<double> module_entropy;  // H(P^i)
  double codelength = 0.0;             // bits
  std::size_t num_modules = 0;

  // q H(Q) + sum_i p_i H(P^i) from the stored parts.
  double recompute() const;
};

// Evaluates the map equation term by term. Throws ParameterError if the
// partition does not cover exactly the graph's vertices.
MapEquationBreakdown codelength(const RelationGraph& g, const Partition& part);

// A graph at some aggregation level, in flow units. Node flow and exit
// flow differ by the node's self-loop (internal) flow. The leaf entropy
// term stays that of the original vertices at every level.
class FlowGraph {
 public:
  static FlowGraph from_graph(const RelationGraph& g);

  std::size_t num_nodes() const { return flow_.size(); }
  double node_flow(std::uint32_t v) const { return flow_[v]; }
  double node_exit(std::uint32_t v) const { return exit_[v]; }
  // Self-loop weight in original units: twice the internal weight merged
  // into this node.
  double self_loop_weight(std::uint32_t v) const;
  double total_weight() const { return total_weight_; }
  // Neighbor weights are one-directional edge flows w / (2 W).
  std::span<const Neighbor> neighbors(std::uint32_t v) const { return adj_[v]; }
  double leaf_plogp_sum() const { return leaf_plogp_; }

  // One node per module; inter-module edge flows are summed, internal flow
  // becomes self-loop flow.
  FlowGraph aggregate(const Partition& part) const;

 private:
  std::vector<double> flow_;
  std::vector<double> exit_;
  std::vector<std::vector<Neighbor>> adj_;
  double total_weight_ = 0.0;
  double leaf_plogp_ = 0.0;
};

// Map equation of a node assignment on a flow graph (labels need not be
// dense).
double codelength_bits(const FlowGraph& g, std::span<const std::uint32_t> labels);

// Per-module exit and flow bookkeeping for incremental single-node moves.
// Module ids live in [0, num_nodes).
class ModuleState {
 public:
  ModuleState(const FlowGraph& g, const Partition& initial);

  const std::vector<std::uint32_t>& assignment() const { return module_; }
  std::uint32_t module_of(std::uint32_t v) const { return module_[v]; }
  double codelength() const;

  // Change in codelength if `v` moved to `target`.
  double delta_move(std::uint32_t v, std::uint32_t target) const;
  // Same, with the flows between v and its current / target module given.
  double delta_move(std::uint32_t v, std::uint32_t target, double flow_to_current,
                    double flow_to_target) const;
  void move(std::uint32_t v, std::uint32_t target, double flow_to_current,
            double flow_to_target);
  void move(std::uint32_t v, std::uint32_t target);

  // Recomputes the running sums from the module totals.
  void refresh();

 private:
  double flow_between(std::uint32_t v, std::uint32_t module) const;

  const FlowGraph* g_;
  std::vector<std::uint32_t> module_;
  std::vector<double> exit_;
  std::vector<double> flow_;
  double sum_exit_ = 0.0;
  double sum_plogp_exit_ = 0.0;
  double sum_plogp_usage_ = 0.0;
};

struct DetectorConfig {
  std::uint64_t rng_seed = 0;
  double convergence_tolerance = 1e-10;
  std::optional<std::size_t> max_outer_levels;
};

struct Detection {
  Partition partition;
  MapEquationBreakdown breakdown;
  std::size_t levels = 0;
};

// Local moves from singletons, aggregation, repeat until the codelength
// stops decreasing. Deterministic for a fixed seed.
Detection detect(const RelationGraph& g, const DetectorConfig& cfg = {});

// Enumerates every set partition (at most 12 vertices) and returns the
// first global minimizer in restricted-growth-string order.
Detection exhaustive_min_codelength(const RelationGraph& g);

// Partition CSV: header "sample_id,community_id", one row per vertex.
std::string serialize_partition(std::span<const std::string> ids,
                                const Partition& part);
// Returns (ids, partition) in file order.
std::pair<std::vector<std::string>, Partition> parse_partition(std::string_view text);

}  // namespace malcomm

#endif  // MALCOMM_INFOMAP_HPP_
