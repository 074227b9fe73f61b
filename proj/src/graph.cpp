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

#include "malcomm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "malcomm/error.hpp"
#include "malcomm/text_format.hpp"
#include "parallel.hpp"

namespace malcomm {

namespace {

void check_p(double p) {
  if (!(p > 0.0 && p <= 100.0)) {
    throw ParameterError("p must be in (0, 100], got " + format_sig10(p));
  }
}

void check_k(std::size_t k, std::size_t n) {
  if (k < 1 || k >= n) {
    throw ParameterError("k must satisfy 1 <= k < n (n = " + std::to_string(n) +
                         "), got " + std::to_string(k));
  }
}

void check_vertices(const WeightSet& w, std::span<const std::string> vertices) {
  if (w.num_vertices() != vertices.size()) {
    throw ParameterError("weight set has " + std::to_string(w.num_vertices()) +
                         " vertices but " + std::to_string(vertices.size()) +
                         " ids were given");
  }
}

std::vector<std::string> to_vector(std::span<const std::string> s) {
  return {s.begin(), s.end()};
}

// Undirected union of per-vertex selections.
std::vector<Edge> selection_edges(
    const WeightSet& w, const std::vector<std::vector<std::uint32_t>>& picks) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t v = 0; v < picks.size(); ++v) {
    for (std::uint32_t u : picks[v]) pairs.emplace_back(std::minmax(u, v));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  const double floor = floor_weight(w);
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [u, v] : pairs) {
    const double wt = w.weight(u, v);
    edges.push_back({u, v, wt > 0.0 ? wt : floor});
  }
  return edges;
}

}  // namespace

GraphMethod parse_graph_method(std::string_view token) {
  if (token == "epsilon") return GraphMethod::kEpsilon;
  if (token == "knn") return GraphMethod::kKnn;
  if (token == "en") return GraphMethod::kEn;
  throw ParameterError("method must be one of epsilon|knn|en, got '" +
                       std::string(token) + "'");
}

std::string graph_method_name(GraphMethod m) {
  switch (m) {
    case GraphMethod::kEpsilon: return "epsilon";
    case GraphMethod::kKnn: return "knn";
    case GraphMethod::kEn: return "en";
  }
  return "?";
}

RelationGraph::RelationGraph(std::vector<std::string> vertices,
                             std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  const std::size_t n = vertices_.size();
  for (Edge& e : edges_) {
    if (e.u == e.v) throw ParameterError("self-loop in relation graph");
    if (e.u >= n || e.v >= n) throw ParameterError("edge endpoint out of range");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw ParameterError("edge weight must be positive and finite");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v) {
      throw ParameterError("duplicate edge in relation graph");
    }
  }
  adj_.resize(n);
  for (const Edge& e : edges_) {
    adj_[e.u].push_back({e.v, e.weight});
    adj_[e.v].push_back({e.u, e.weight});
  }
  for (auto& row : adj_) {
    std::sort(row.begin(), row.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
  }
}

double RelationGraph::strength(std::uint32_t v) const {
  double s = 0.0;
  for (const auto& nb : adj_[v]) s += nb.weight;
  return s;
}

double RelationGraph::total_weight() const {
  double s = 0.0;
  for (const Edge& e : edges_) s += e.weight;
  return s;
}

std::size_t RelationGraph::num_isolated() const {
  return static_cast<std::size_t>(std::count_if(
      adj_.begin(), adj_.end(), [](const auto& row) { return row.empty(); }));
}

bool RelationGraph::has_edge(std::uint32_t u, std::uint32_t v) const {
  const auto& row = adj_[u];
  return std::binary_search(
      row.begin(), row.end(), Neighbor{v, 0.0},
      [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
}

Cutoff percentile_cutoff(const WeightSet& w, double p) {
  check_p(p);
  if (w.empty()) throw ParameterError("percentile cutoff of an empty weight set");
  const std::size_t total = w.size();
  // p * |W| is exact for integral p, so the ceiling is not disturbed by a
  // rounding error in p / 100.
  auto m = static_cast<std::size_t>(std::ceil(p * static_cast<double>(total) / 100.0));
  m = std::clamp<std::size_t>(m, 1, total);

  std::vector<double> values;
  values.reserve(total);
  w.for_each_pair([&](std::uint32_t, std::uint32_t, double x) { values.push_back(x); });
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(m - 1);
  std::nth_element(values.begin(), nth, values.end(), std::greater<>());
  return {*nth, m};
}

RelationGraph build_epsilon(const WeightSet& w,
                            std::span<const std::string> vertices,
                            double epsilon, Threshold rule) {
  check_vertices(w, vertices);
  if (!(epsilon >= 0.0)) throw ParameterError("epsilon must be >= 0");
  std::vector<Edge> edges;
  w.for_each_pair([&](std::uint32_t i, std::uint32_t j, double x) {
    const bool keep = rule == Threshold::kAtLeast ? x >= epsilon : x > epsilon;
    if (keep) edges.push_back({i, j, x});
  });
  return RelationGraph(to_vector(vertices), std::move(edges));
}

double floor_weight(const WeightSet& w) {
  const double m = w.min_positive();
  return (m > 0.0 ? m : 1.0) * 1e-3;
}

std::vector<std::uint32_t> id_ranks(std::span<const std::string> vertices) {
  std::vector<std::uint32_t> order(vertices.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return vertices[a] < vertices[b];
  });
  std::vector<std::uint32_t> rank(vertices.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  return rank;
}

std::vector<std::uint32_t> nearest_neighbors(
    const WeightSet& w, std::span<const std::uint32_t> id_rank,
    std::uint32_t v, std::size_t k, NeighborSelection how) {
  const std::size_t n = w.num_vertices();
  k = std::min(k, n - 1);
  struct Candidate {
    double weight;
    std::uint32_t rank;
    std::uint32_t vertex;
  };
  const auto better = [](const Candidate& a, const Candidate& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.rank < b.rank;
  };
  const auto row = w.neighbors(v);
  std::vector<Candidate> cand;

  if (how == NeighborSelection::kFullSort) {
    cand.reserve(n - 1);
    std::size_t r = 0;
    for (std::uint32_t u = 0; u < n; ++u) {
      if (u == v) continue;
      double x = 0.0;
      if (r < row.size() && row[r].vertex == u) x = row[r++].weight;
      cand.push_back({x, id_rank[u], u});
    }
    std::sort(cand.begin(), cand.end(), better);
  } else {
    cand.reserve(row.size());
    for (const auto& nb : row) cand.push_back({nb.weight, id_rank[nb.vertex], nb.vertex});
    if (cand.size() >= k) {
      std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k),
                        cand.end(), better);
    } else {
      // Every positive neighbor is selected; the rest come from the
      // zero-weight candidates with the smallest ids.
      std::sort(cand.begin(), cand.end(), better);
      std::vector<Candidate> zeros;
      std::size_t r = 0;
      for (std::uint32_t u = 0; u < n; ++u) {
        if (u == v) continue;
        if (r < row.size() && row[r].vertex == u) {
          ++r;
          continue;
        }
        zeros.push_back({0.0, id_rank[u], u});
      }
      const std::size_t need = k - cand.size();
      std::partial_sort(zeros.begin(), zeros.begin() + static_cast<std::ptrdiff_t>(need),
                        zeros.end(), better);
      cand.insert(cand.end(), zeros.begin(),
                  zeros.begin() + static_cast<std::ptrdiff_t>(need));
    }
  }
  std::vector<std::uint32_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(cand[i].vertex);
  return out;
}

RelationGraph build_knn(const WeightSet& w, std::span<const std::string> vertices,
                        std::size_t k, NeighborSelection how, int threads) {
  check_vertices(w, vertices);
  const std::size_t n = vertices.size();
  check_k(k, n);
  const auto rank = id_ranks(vertices);
  std::vector<std::vector<std::uint32_t>> picks(n);
  internal::parallel_blocks(n, threads, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t v = b; v < e; ++v) {
      picks[v] = nearest_neighbors(w, rank, static_cast<std::uint32_t>(v), k, how);
    }
  });
  return RelationGraph(to_vector(vertices), selection_edges(w, picks));
}

RelationGraph build_en(const WeightSet& w, std::span<const std::string> vertices,
                       double p, std::size_t k, EnBuildStats* stats,
                       int threads) {
  check_vertices(w, vertices);
  check_p(p);
  const std::size_t n = vertices.size();
  EnBuildStats local;
  if (n < 2) {
    if (stats) *stats = local;
    return RelationGraph(to_vector(vertices), {});
  }
  check_k(k, n);

  std::vector<Edge> edges;
  std::vector<char> covered(n, 0);
  if (!w.empty()) {
    local.cutoff = percentile_cutoff(w, p);
    const double eps = local.cutoff.epsilon;
    w.for_each_pair([&](std::uint32_t i, std::uint32_t j, double x) {
      if (x >= eps) {
        edges.push_back({i, j, x});
        covered[i] = covered[j] = 1;
      }
    });
  }
  local.epsilon_edges = edges.size();

  std::vector<std::uint32_t> isolated;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (!covered[v]) isolated.push_back(v);
  }
  local.isolated_before_fallback = isolated.size();

  if (!isolated.empty()) {
    const auto rank = id_ranks(vertices);
    std::vector<std::vector<std::uint32_t>> picks(n);
    internal::parallel_blocks(
        isolated.size(), threads, [&](std::size_t, std::size_t b, std::size_t e) {
          for (std::size_t i = b; i < e; ++i) {
            picks[isolated[i]] =
                nearest_neighbors(w, rank, isolated[i], k, NeighborSelection::kPartial);
          }
        });
    // Fallback pairs never coincide with step-1 edges: one endpoint is
    // isolated after step 1.
    std::vector<Edge> extra = selection_edges(w, picks);
    local.fallback_edges = extra.size();
    edges.insert(edges.end(), extra.begin(), extra.end());
  }
  if (stats) *stats = local;
  return RelationGraph(to_vector(vertices), std::move(edges));
}

GraphBuildResult build_graph(const WeightSet& w,
                             std::span<const std::string> vertices,
                             const GraphBuildParams& params) {
  GraphBuildResult out;
  switch (params.method) {
    case GraphMethod::kEpsilon: {
      double eps = 0.0;
      Threshold rule = Threshold::kAtLeast;
      if (params.epsilon) {
        eps = *params.epsilon;
        rule = Threshold::kGreater;
      } else {
        check_p(params.p);
        if (!w.empty()) {
          out.cutoff = percentile_cutoff(w, params.p);
          eps = out.cutoff->epsilon;
        }
      }
      out.graph = build_epsilon(w, vertices, eps, rule);
      out.isolated_before_fallback = out.graph.num_isolated();
      break;
    }
    case GraphMethod::kKnn:
      out.graph = build_knn(w, vertices, params.k, NeighborSelection::kFullSort,
                            params.threads);
      break;
    case GraphMethod::kEn: {
      if (params.epsilon) {
        throw ParameterError("--epsilon applies to the epsilon method only");
      }
      EnBuildStats stats;
      out.graph = build_en(w, vertices, params.p, params.k, &stats, params.threads);
      out.isolated_before_fallback = stats.isolated_before_fallback;
      if (stats.cutoff.rank > 0) out.cutoff = stats.cutoff;
      break;
    }
  }
  return out;
}

std::string serialize_edge_list(const RelationGraph& g, bool list_isolated) {
  const auto& ids = g.vertices();
  struct Line {
    const std::string* src;
    const std::string* dst;
    double weight;
  };
  std::vector<Line> lines;
  lines.reserve(g.num_edges());
  for (const Edge& e : g.edges()) {
    const std::string* a = &ids[e.u];
    const std::string* b = &ids[e.v];
    if (*b < *a) std::swap(a, b);
    lines.push_back({a, b, e.weight});
  }
  std::sort(lines.begin(), lines.end(), [](const Line& x, const Line& y) {
    if (*x.src != *y.src) return *x.src < *y.src;
    return *x.dst < *y.dst;
  });
  std::string out = "# vertices: " + std::to_string(g.num_vertices()) + "\n";
  for (const Line& l : lines) {
    out += *l.src + '\t' + *l.dst + '\t' + format_sig10(l.weight) + '\n';
  }
  if (list_isolated) {
    for (std::uint32_t v = 0; v < g.num_vertices(); ++v) {
      if (g.degree(v) == 0) out += ids[v] + "\t\t0\n";
    }
  }
  return out;
}

RelationGraph parse_edge_list(std::string_view text) {
  std::vector<std::string> vertices;
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<Edge> edges;
  std::optional<std::size_t> declared;
  const auto vertex = [&](const std::string& id) {
    auto [it, inserted] = index.emplace(id, static_cast<std::uint32_t>(vertices.size()));
    if (inserted) vertices.push_back(id);
    return it->second;
  };
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '#') {
      constexpr std::string_view kHeader = "# vertices: ";
      if (line.substr(0, kHeader.size()) == kHeader) {
        try {
          declared = std::stoul(std::string(line.substr(kHeader.size())));
        } catch (const std::exception&) {
          throw FormatError(where + "bad vertex count header");
        }
      }
      continue;
    }
    const auto fields = split(line, '\t');
    if (fields.size() != 3 || fields[0].empty()) {
      throw FormatError(where + "expected src<TAB>dst<TAB>weight");
    }
    if (fields[1].empty()) {
      vertex(fields[0]);
      continue;
    }
    double wt = 0.0;
    try {
      std::size_t used = 0;
      wt = std::stod(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw FormatError(where + "bad weight '" + fields[2] + "'");
    }
    if (!(wt > 0.0)) throw FormatError(where + "edge weight must be positive");
    if (fields[0] == fields[1]) throw FormatError(where + "self-loop");
    edges.push_back({vertex(fields[0]), vertex(fields[1]), wt});
  }
  if (!declared) throw FormatError("missing '# vertices: n' header");
  if (*declared != vertices.size()) {
    throw FormatError("header declares " + std::to_string(*declared) +
                      " vertices but the file lists " +
                      std::to_string(vertices.size()));
  }
  try {
    return RelationGraph(std::move(vertices), std::move(edges));
  } catch (const ParameterError& e) {
    throw FormatError(e.what());
  }
}

}  // namespace malcomm
