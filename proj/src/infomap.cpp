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

#include "malcomm/infomap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "malcomm/error.hpp"

namespace malcomm {

namespace {

// SplitMix64: small, fully specified generator so shuffles are identical on
// every platform for a given seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  // Uniform in [0, bound) by rejection.
  std::uint64_t bounded(std::uint64_t bound) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::uint64_t state_;
};

void shuffle(std::vector<std::uint32_t>& order, SplitMix64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = rng.bounded(i);
    std::swap(order[i - 1], order[j]);
  }
}

// Dense module ids for arbitrary labels, plus the module count.
std::pair<std::vector<std::uint32_t>, std::uint32_t> densify(
    std::span<const std::uint32_t> labels) {
  std::unordered_map<std::uint32_t, std::uint32_t> ids;
  std::vector<std::uint32_t> out(labels.size());
  for (std::size_t v = 0; v < labels.size(); ++v) {
    auto [it, inserted] =
        ids.emplace(labels[v], static_cast<std::uint32_t>(ids.size()));
    out[v] = it->second;
  }
  return {std::move(out), static_cast<std::uint32_t>(ids.size())};
}

// Module exit and flow totals of a dense assignment.
void module_totals(const FlowGraph& g, std::span<const std::uint32_t> module,
                   std::vector<double>& exit, std::vector<double>& flow) {
  for (std::uint32_t v = 0; v < g.num_nodes(); ++v) {
    const std::uint32_t m = module[v];
    exit[m] += g.node_exit(v);
    flow[m] += g.node_flow(v);
    for (const Neighbor& nb : g.neighbors(v)) {
      if (module[nb.vertex] == m) exit[m] -= nb.weight;
    }
  }
  for (double& q : exit) q = std::max(q, 0.0);
}

double fast_codelength(std::span<const double> exit, std::span<const double> flow,
                       double leaf_plogp) {
  double sum_exit = 0.0;
  double sum_plogp_exit = 0.0;
  double sum_plogp_usage = 0.0;
  for (std::size_t m = 0; m < exit.size(); ++m) {
    sum_exit += exit[m];
    sum_plogp_exit += plogp(exit[m]);
    sum_plogp_usage += plogp(exit[m] + flow[m]);
  }
  return plogp(sum_exit) - 2.0 * sum_plogp_exit - leaf_plogp + sum_plogp_usage;
}

void check_cover(const RelationGraph& g, const Partition& part) {
  if (part.size() != g.num_vertices()) {
    throw ParameterError("partition covers " + std::to_string(part.size()) +
                         " vertices but the graph has " +
                         std::to_string(g.num_vertices()));
  }
}

}  // namespace

double plogp(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

double entropy_bits(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) return 0.0;
  double h = 0.0;
  for (double w : weights) h -= plogp(w / total);
  return std::max(h, 0.0);
}

FlowModel compute_flows(const RelationGraph& g) {
  FlowModel f;
  f.total_weight = g.total_weight();
  const std::size_t n = g.num_vertices();
  f.visit_rate.assign(n, 0.0);
  if (!(f.total_weight > 0.0)) {
    if (n == 1) {
      f.visit_rate[0] = 1.0;
      return f;
    }
    throw ParameterError("graph with " + std::to_string(n) +
                         " vertices has zero total weight");
  }
  for (std::uint32_t v = 0; v < n; ++v) {
    f.visit_rate[v] = g.strength(v) / (2.0 * f.total_weight);
  }
  return f;
}

Partition Partition::from_labels(std::span<const std::uint32_t> labels) {
  Partition p;
  std::tie(p.assignment_, p.num_modules_) = densify(labels);
  return p;
}

Partition Partition::singletons(std::size_t n) {
  Partition p;
  p.assignment_.resize(n);
  std::iota(p.assignment_.begin(), p.assignment_.end(), 0u);
  p.num_modules_ = static_cast<std::uint32_t>(n);
  return p;
}

Partition Partition::whole(std::size_t n) {
  Partition p;
  p.assignment_.assign(n, 0u);
  p.num_modules_ = n > 0 ? 1 : 0;
  return p;
}

std::vector<std::vector<std::uint32_t>> Partition::members() const {
  std::vector<std::vector<std::uint32_t>> out(num_modules_);
  for (std::uint32_t v = 0; v < assignment_.size(); ++v) {
    out[assignment_[v]].push_back(v);
  }
  return out;
}

double MapEquationBreakdown::recompute() const {
  double l = exit_total * index_entropy;
  for (std::size_t i = 0; i < num_modules; ++i) {
    l += module_usage[i] * module_entropy[i];
  }
  return l;
}

MapEquationBreakdown codelength(const RelationGraph& g, const Partition& part) {
  check_cover(g, part);
  const FlowModel flows = compute_flows(g);
  const std::size_t m = part.num_modules();
  MapEquationBreakdown b;
  b.num_modules = m;
  b.exit_rate.assign(m, 0.0);
  b.module_usage.assign(m, 0.0);
  b.module_entropy.assign(m, 0.0);
  const double two_w = 2.0 * flows.total_weight;

  if (two_w > 0.0) {
    for (const Edge& e : g.edges()) {
      if (part[e.u] != part[e.v]) {
        b.exit_rate[part[e.u]] += e.weight / two_w;
        b.exit_rate[part[e.v]] += e.weight / two_w;
      }
    }
  }
  std::vector<std::vector<double>> codebook(m);
  for (std::size_t i = 0; i < m; ++i) codebook[i].push_back(b.exit_rate[i]);
  for (std::uint32_t v = 0; v < g.num_vertices(); ++v) {
    codebook[part[v]].push_back(flows.visit_rate[v]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    b.exit_total += b.exit_rate[i];
    for (double x : codebook[i]) b.module_usage[i] += x;
    b.module_entropy[i] = entropy_bits(codebook[i]);
  }
  b.index_entropy = b.exit_total > 0.0 ? entropy_bits(b.exit_rate) : 0.0;
  b.codelength = b.recompute();
  return b;
}

FlowGraph FlowGraph::from_graph(const RelationGraph& g) {
  const FlowModel flows = compute_flows(g);
  FlowGraph fg;
  const std::size_t n = g.num_vertices();
  fg.total_weight_ = flows.total_weight;
  fg.flow_ = flows.visit_rate;
  fg.exit_.assign(n, 0.0);
  fg.adj_.resize(n);
  const double two_w = 2.0 * flows.total_weight;
  for (std::uint32_t v = 0; v < n; ++v) {
    for (const Neighbor& nb : g.neighbors(v)) {
      const double f = nb.weight / two_w;
      fg.adj_[v].push_back({nb.vertex, f});
      fg.exit_[v] += f;
    }
    fg.leaf_plogp_ += plogp(fg.flow_[v]);
  }
  return fg;
}

double FlowGraph::self_loop_weight(std::uint32_t v) const {
  return std::max(flow_[v] - exit_[v], 0.0) * 2.0 * total_weight_;
}

FlowGraph FlowGraph::aggregate(const Partition& part) const {
  if (part.size() != num_nodes()) {
    throw ParameterError("partition does not match the flow graph");
  }
  const std::uint32_t m = part.num_modules();
  FlowGraph out;
  out.total_weight_ = total_weight_;
  out.leaf_plogp_ = leaf_plogp_;
  out.flow_.assign(m, 0.0);
  out.exit_.assign(m, 0.0);
  out.adj_.resize(m);

  std::vector<double> acc(m, 0.0);
  std::vector<char> seen(m, 0);
  std::vector<std::uint32_t> touched;
  const auto groups = part.members();
  for (std::uint32_t a = 0; a < m; ++a) {
    touched.clear();
    for (std::uint32_t v : groups[a]) {
      out.flow_[a] += flow_[v];
      for (const Neighbor& nb : adj_[v]) {
        const std::uint32_t b = part[nb.vertex];
        if (b == a) continue;
        if (!seen[b]) {
          seen[b] = 1;
          touched.push_back(b);
        }
        acc[b] += nb.weight;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::uint32_t b : touched) {
      out.adj_[a].push_back({b, acc[b]});
      out.exit_[a] += acc[b];
      acc[b] = 0.0;
      seen[b] = 0;
    }
  }
  return out;
}

double codelength_bits(const FlowGraph& g, std::span<const std::uint32_t> labels) {
  if (labels.size() != g.num_nodes()) {
    throw ParameterError("labels do not match the flow graph");
  }
  const auto [module, m] = densify(labels);
  std::vector<double> exit(m, 0.0);
  std::vector<double> flow(m, 0.0);
  module_totals(g, module, exit, flow);
  return fast_codelength(exit, flow, g.leaf_plogp_sum());
}

ModuleState::ModuleState(const FlowGraph& g, const Partition& initial)
    : g_(&g), module_(initial.assignment()) {
  if (initial.size() != g.num_nodes()) {
    throw ParameterError("partition does not match the flow graph");
  }
  refresh();
}

void ModuleState::refresh() {
  const std::size_t n = g_->num_nodes();
  exit_.assign(n, 0.0);
  flow_.assign(n, 0.0);
  module_totals(*g_, module_, exit_, flow_);
  sum_exit_ = 0.0;
  sum_plogp_exit_ = 0.0;
  sum_plogp_usage_ = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    sum_exit_ += exit_[m];
    sum_plogp_exit_ += plogp(exit_[m]);
    sum_plogp_usage_ += plogp(exit_[m] + flow_[m]);
  }
}

double ModuleState::codelength() const {
  return plogp(sum_exit_) - 2.0 * sum_plogp_exit_ - g_->leaf_plogp_sum() +
         sum_plogp_usage_;
}

double ModuleState::flow_between(std::uint32_t v, std::uint32_t module) const {
  double f = 0.0;
  for (const Neighbor& nb : g_->neighbors(v)) {
    if (module_[nb.vertex] == module) f += nb.weight;
  }
  return f;
}

double ModuleState::delta_move(std::uint32_t v, std::uint32_t target) const {
  return delta_move(v, target, flow_between(v, module_[v]),
                    flow_between(v, target));
}

double ModuleState::delta_move(std::uint32_t v, std::uint32_t target,
                               double flow_to_current,
                               double flow_to_target) const {
  const std::uint32_t a = module_[v];
  if (a == target) return 0.0;
  const std::uint32_t b = target;
  const double x = g_->node_exit(v);
  const double p = g_->node_flow(v);
  const double qa = exit_[a];
  const double qb = exit_[b];
  const double qa_new = qa - x + 2.0 * flow_to_current;
  const double qb_new = qb + x - 2.0 * flow_to_target;
  const double fa_new = flow_[a] - p;
  const double fb_new = flow_[b] + p;
  const double sum_new = sum_exit_ + (qa_new - qa) + (qb_new - qb);

  const double d_index = plogp(sum_new) - plogp(sum_exit_);
  const double d_exit = plogp(qa_new) + plogp(qb_new) - plogp(qa) - plogp(qb);
  const double d_usage = plogp(qa_new + fa_new) + plogp(qb_new + fb_new) -
                         plogp(qa + flow_[a]) - plogp(qb + flow_[b]);
  return d_index - 2.0 * d_exit + d_usage;
}

void ModuleState::move(std::uint32_t v, std::uint32_t target) {
  move(v, target, flow_between(v, module_[v]), flow_between(v, target));
}

void ModuleState::move(std::uint32_t v, std::uint32_t target,
                       double flow_to_current, double flow_to_target) {
  const std::uint32_t a = module_[v];
  if (a == target) return;
  const std::uint32_t b = target;
  const double x = g_->node_exit(v);
  const double p = g_->node_flow(v);

  sum_plogp_exit_ -= plogp(exit_[a]) + plogp(exit_[b]);
  sum_plogp_usage_ -= plogp(exit_[a] + flow_[a]) + plogp(exit_[b] + flow_[b]);
  const double qa_new = std::max(exit_[a] - x + 2.0 * flow_to_current, 0.0);
  const double qb_new = std::max(exit_[b] + x - 2.0 * flow_to_target, 0.0);
  sum_exit_ += (qa_new - exit_[a]) + (qb_new - exit_[b]);
  exit_[a] = qa_new;
  exit_[b] = qb_new;
  flow_[a] -= p;
  flow_[b] += p;
  sum_plogp_exit_ += plogp(exit_[a]) + plogp(exit_[b]);
  sum_plogp_usage_ += plogp(exit_[a] + flow_[a]) + plogp(exit_[b] + flow_[b]);
  module_[v] = b;
}

namespace {

// Repeated shuffled passes of best single-node moves until a pass moves
// nothing. Returns whether any node moved.
bool local_moves(const FlowGraph& g, ModuleState& state, SplitMix64& rng,
                 double tolerance) {
  const std::size_t n = g.num_nodes();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::vector<double> to_module(n, 0.0);
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> touched;
  bool any = false;
  while (true) {
    state.refresh();
    shuffle(order, rng);
    std::size_t moves = 0;
    for (std::uint32_t v : order) {
      touched.clear();
      for (const Neighbor& nb : g.neighbors(v)) {
        const std::uint32_t m = state.module_of(nb.vertex);
        if (!seen[m]) {
          seen[m] = 1;
          touched.push_back(m);
        }
        to_module[m] += nb.weight;
      }
      const std::uint32_t current = state.module_of(v);
      const double to_current = to_module[current];
      double best_delta = std::numeric_limits<double>::infinity();
      std::uint32_t best = current;
      for (std::uint32_t m : touched) {
        if (m == current) continue;
        const double d = state.delta_move(v, m, to_current, to_module[m]);
        if (d < best_delta || (d == best_delta && m < best)) {
          best_delta = d;
          best = m;
        }
      }
      const double to_best = best != current ? to_module[best] : 0.0;
      for (std::uint32_t m : touched) {
        to_module[m] = 0.0;
        seen[m] = 0;
      }
      if (best != current && best_delta < -tolerance) {
        state.move(v, best, to_current, to_best);
        ++moves;
      }
    }
    if (moves == 0) break;
    any = true;
  }
  return any;
}

}  // namespace

Detection detect(const RelationGraph& g, const DetectorConfig& cfg) {
  if (g.num_vertices() == 0) throw ParameterError("cannot detect on an empty graph");
  if (!(cfg.convergence_tolerance > 0.0)) {
    throw ParameterError("convergence tolerance must be > 0");
  }
  FlowGraph level = FlowGraph::from_graph(g);
  const std::size_t n = g.num_vertices();
  std::vector<std::uint32_t> leaf(n);
  std::iota(leaf.begin(), leaf.end(), 0u);
  double current = codelength_bits(level, leaf);

  SplitMix64 root(cfg.rng_seed);
  Detection out;
  while (!cfg.max_outer_levels || out.levels < *cfg.max_outer_levels) {
    SplitMix64 rng(root.next());
    ModuleState state(level, Partition::singletons(level.num_nodes()));
    if (!local_moves(level, state, rng, cfg.convergence_tolerance)) break;
    const Partition coarse = Partition::from_labels(state.assignment());
    const double next = codelength_bits(level, coarse.assignment());
    if (!(next < current - cfg.convergence_tolerance)) break;
    for (auto& m : leaf) m = coarse[m];
    level = level.aggregate(coarse);
    current = next;
    ++out.levels;
  }
  out.partition = Partition::from_labels(leaf);
  out.breakdown = codelength(g, out.partition);
  return out;
}

Detection exhaustive_min_codelength(const RelationGraph& g) {
  const std::size_t n = g.num_vertices();
  if (n == 0) throw ParameterError("cannot enumerate partitions of an empty graph");
  if (n > 12) {
    throw ParameterError("exhaustive search supports at most 12 vertices, got " +
                         std::to_string(n));
  }
  const FlowGraph fg = FlowGraph::from_graph(g);
  // Restricted growth strings: rgs[0] = 0, rgs[i] <= 1 + max(rgs[0..i)).
  std::vector<std::uint32_t> rgs(n, 0);
  std::vector<std::uint32_t> prefix_max(n, 0);
  std::vector<std::uint32_t> best = rgs;
  double best_len = std::numeric_limits<double>::infinity();
  std::vector<double> exit(n);
  std::vector<double> flow(n);
  while (true) {
    const std::uint32_t m = prefix_max[n - 1] + 1;
    std::fill(exit.begin(), exit.begin() + m, 0.0);
    std::fill(flow.begin(), flow.begin() + m, 0.0);
    std::span<double> e(exit.data(), m);
    std::span<double> f(flow.data(), m);
    module_totals(fg, rgs, exit, flow);
    const double len = fast_codelength(e, f, fg.leaf_plogp_sum());
    if (len < best_len - 1e-12) {
      best_len = len;
      best = rgs;
    }
    // Advance to the next string.
    std::size_t i = n - 1;
    while (i > 0 && rgs[i] == prefix_max[i - 1] + 1) --i;
    if (i == 0) break;
    ++rgs[i];
    prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      rgs[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
  Detection out;
  out.partition = Partition::from_labels(best);
  out.breakdown = codelength(g, out.partition);
  return out;
}

std::string serialize_partition(std::span<const std::string> ids,
                                const Partition& part) {
  if (ids.size() != part.size()) {
    throw ParameterError("partition and id list sizes differ");
  }
  std::string out = "sample_id,community_id\n";
  for (std::size_t v = 0; v < ids.size(); ++v) {
    out += ids[v] + ',' + std::to_string(part[v]) + '\n';
  }
  return out;
}

std::pair<std::vector<std::string>, Partition> parse_partition(std::string_view text) {
  std::vector<std::string> ids;
  std::vector<std::uint32_t> labels;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header = false;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (!header) {
      if (line != "sample_id,community_id") {
        throw FormatError(where + "expected header 'sample_id,community_id'");
      }
      header = true;
      continue;
    }
    const std::size_t comma = line.rfind(',');
    if (comma == std::string_view::npos || comma == 0) {
      throw FormatError(where + "expected sample_id,community_id");
    }
    const std::string cid(line.substr(comma + 1));
    unsigned long value = 0;
    try {
      std::size_t used = 0;
      value = std::stoul(cid, &used);
      if (used != cid.size() || value > 0xFFFFFFFFul) throw std::out_of_range("id");
    } catch (const std::exception&) {
      throw FormatError(where + "bad community id '" + cid + "'");
    }
    ids.emplace_back(line.substr(0, comma));
    labels.push_back(static_cast<std::uint32_t>(value));
  }
  if (!header) throw FormatError("partition file is empty");
  return {std::move(ids), Partition::from_labels(labels)};
}

}  // namespace malcomm
