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
#include <map>
#include <memory>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "malcomm/error.hpp"

using namespace malcomm;
using malcomm::testing::barbell;

namespace {

const std::vector<std::uint32_t> kBarbellSplit = {0, 0, 0, 1, 1, 1};

// Two-level map equation written out term by term.
double reference_codelength(const RelationGraph& g, const std::vector<std::uint32_t>& labels) {
  const std::size_t n = g.num_vertices();
  const double two_w = 2.0 * g.total_weight();
  std::vector<double> p(n);
  for (std::uint32_t v = 0; v < n; ++v) p[v] = g.strength(v) / two_w;
  std::map<std::uint32_t, double> exit;
  for (std::uint32_t v = 0; v < n; ++v) exit[labels[v]] += 0.0;
  for (const Edge& e : g.edges()) {
    if (labels[e.u] != labels[e.v]) {
      exit[labels[e.u]] += e.weight / two_w;
      exit[labels[e.v]] += e.weight / two_w;
    }
  }
  auto h = [](const std::vector<double>& xs) {
    double total = 0.0;
    for (double x : xs) total += x;
    if (total <= 0.0) return 0.0;
    double out = 0.0;
    for (double x : xs) {
      if (x > 0.0) out -= (x / total) * std::log2(x / total);
    }
    return out;
  };
  double q = 0.0;
  std::vector<double> qs;
  for (const auto& [m, x] : exit) {
    q += x;
    qs.push_back(x);
  }
  double l = q * h(qs);
  for (const auto& [m, x] : exit) {
    std::vector<double> parts = {x};
    double usage = x;
    for (std::uint32_t v = 0; v < n; ++v) {
      if (labels[v] == m) {
        parts.push_back(p[v]);
        usage += p[v];
      }
    }
    l += usage * h(parts);
  }
  return l;
}

std::vector<std::uint32_t> random_labels(std::mt19937_64& rng, std::size_t n) {
  const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % n);
  std::vector<std::uint32_t> labels(n);
  for (auto& l : labels) l = static_cast<std::uint32_t>(rng() % k);
  return labels;
}

}  // namespace

TEST_CASE("visit rates") {
  const FlowModel b = compute_flows(barbell());
  CHECK(b.total_weight == 7.0);
  CHECK(b.visit_rate[2] == doctest::Approx(3.0 / 14.0));
  CHECK(b.visit_rate[0] == doctest::Approx(2.0 / 14.0));

  const FlowModel e = compute_flows(testing::single_edge());
  CHECK(e.visit_rate[0] == 0.5);
  CHECK(e.visit_rate[1] == 0.5);

  const RelationGraph star(testing::numbered_ids(4), {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
  const FlowModel s = compute_flows(star);
  CHECK(s.visit_rate[0] == doctest::Approx(0.5));
  for (int leaf = 1; leaf < 4; ++leaf) CHECK(s.visit_rate[leaf] == doctest::Approx(1.0 / 6.0));

  CHECK(compute_flows(RelationGraph({"x"}, {})).visit_rate[0] == 1.0);
  CHECK_THROWS_AS(compute_flows(RelationGraph({"x", "y"}, {})), ParameterError);
}

TEST_CASE("barbell codelengths") {
  const RelationGraph g = barbell();
  const auto split = codelength(g, Partition::from_labels(kBarbellSplit));
  CHECK(std::abs(split.codelength - 2.3207) <= 1e-3);
  CHECK(split.exit_total == doctest::Approx(1.0 / 7.0));
  CHECK(split.index_entropy == doctest::Approx(1.0));
  CHECK(split.module_usage[0] == doctest::Approx(4.0 / 7.0));
  CHECK(split.module_entropy[0] == doctest::Approx(1.90564).epsilon(1e-5));

  const auto whole = codelength(g, Partition::whole(6));
  CHECK(std::abs(whole.codelength - 2.5567) <= 1e-3);
  CHECK(whole.exit_total == 0.0);
  CHECK(whole.index_entropy == 0.0);

  const auto single = codelength(g, Partition::singletons(6));
  CHECK(std::abs(single.codelength - 4.5567) <= 1e-3);
  CHECK(single.exit_total == doctest::Approx(1.0));

  for (const auto* b : {&split, &whole, &single}) {
    CHECK(std::abs(b->recompute() - b->codelength) <= 1e-12);
  }
  CHECK(split.codelength == doctest::Approx(reference_codelength(g, kBarbellSplit)));
}

TEST_CASE("codelength matches the term-by-term reference on random graphs") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 15;
    const RelationGraph g = testing::random_graph(rng, n, 0.4);
    const auto labels = random_labels(rng, n);
    const double got = codelength(g, Partition::from_labels(labels)).codelength;
    REQUIRE(std::abs(got - reference_codelength(g, labels)) <= 1e-9);
    const FlowGraph fg = FlowGraph::from_graph(g);
    REQUIRE(std::abs(codelength_bits(fg, labels) - got) <= 1e-9);
  }
}

TEST_CASE("partition canonicalization") {
  const std::vector<std::uint32_t> raw = {7, 7, 2, 9, 2};
  const Partition p = Partition::from_labels(raw);
  CHECK(p.assignment() == std::vector<std::uint32_t>{0, 0, 1, 2, 1});
  CHECK(p.num_modules() == 3);
  CHECK(p.members()[1] == std::vector<std::uint32_t>{2, 4});
  CHECK_THROWS_AS(codelength(barbell(), Partition::whole(5)), ParameterError);
}

TEST_CASE("detector examples") {
  for (std::uint64_t seed : {0ULL, 1ULL, 7ULL, 12345ULL}) {
    DetectorConfig cfg;
    cfg.rng_seed = seed;
    const Detection d = detect(barbell(), cfg);
    CHECK(d.partition == Partition::from_labels(kBarbellSplit));
    CHECK(std::abs(d.breakdown.codelength - 2.3207) <= 1e-3);
  }
  const Detection e = detect(testing::single_edge());
  CHECK(e.partition.num_modules() == 1);
  CHECK(e.breakdown.codelength == doctest::Approx(1.0));
  CHECK(codelength(testing::single_edge(), Partition::singletons(2)).codelength ==
        doctest::Approx(3.0));

  const Detection lone = detect(RelationGraph({"x"}, {}));
  CHECK(lone.partition.num_modules() == 1);
  CHECK(lone.breakdown.codelength == 0.0);

  const Detection cliques = detect(testing::two_cliques());
  CHECK(cliques.partition.num_modules() == 2);
}

TEST_CASE("exhaustive oracle examples") {
  const Detection b = exhaustive_min_codelength(barbell());
  CHECK(b.partition == Partition::from_labels(kBarbellSplit));
  CHECK(std::abs(b.breakdown.codelength - 2.3207) <= 1e-3);

  const Detection e = exhaustive_min_codelength(testing::single_edge());
  CHECK(e.partition.num_modules() == 1);
  CHECK(e.breakdown.codelength == doctest::Approx(1.0));

  const Detection t = exhaustive_min_codelength(testing::triangle());
  CHECK(t.partition.num_modules() == 1);
  CHECK(t.breakdown.codelength == doctest::Approx(std::log2(3.0)));

  CHECK_THROWS_AS(exhaustive_min_codelength(testing::random_graph(
                      *std::make_unique<std::mt19937_64>(1), 13, 0.5)),
                  ParameterError);
}

TEST_CASE("detector never beats the exhaustive minimum") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t n = 2 + rng() % 7;
    const RelationGraph g = testing::random_graph(rng, n, 0.5);
    DetectorConfig cfg;
    cfg.rng_seed = rng();
    const double found = detect(g, cfg).breakdown.codelength;
    const double best = exhaustive_min_codelength(g).breakdown.codelength;
    CHECK(found >= best - 1e-9);
    CHECK(found <= codelength(g, Partition::singletons(n)).codelength + 1e-9);
  }
  for (const RelationGraph& g : {barbell(), testing::triangle(), testing::two_cliques()}) {
    CHECK(detect(g).breakdown.codelength ==
          doctest::Approx(exhaustive_min_codelength(g).breakdown.codelength));
  }
}

TEST_CASE("move delta equals the codelength difference") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng() % 20;
    const RelationGraph g = testing::random_graph(rng, n, 0.3);
    const FlowGraph fg = FlowGraph::from_graph(g);
    const auto labels = random_labels(rng, n);
    const Partition part = Partition::from_labels(labels);
    ModuleState state(fg, part);
    const double before = codelength(g, part).codelength;
    REQUIRE(std::abs(state.codelength() - before) <= 1e-9);

    const auto v = static_cast<std::uint32_t>(rng() % n);
    const auto target = static_cast<std::uint32_t>(rng() % part.num_modules());
    if (target == state.module_of(v)) continue;
    const double delta = state.delta_move(v, target);
    std::vector<std::uint32_t> moved = part.assignment();
    moved[v] = target;
    const double after = codelength(g, Partition::from_labels(moved)).codelength;
    REQUIRE(std::abs(delta - (after - before)) <= 1e-9);
    state.move(v, target);
    REQUIRE(std::abs(state.codelength() - after) <= 1e-9);
  }
}

TEST_CASE("aggregation preserves codelength") {
  std::mt19937_64 rng(314);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng() % 25;
    const RelationGraph g = testing::random_graph(rng, n, 0.3);
    const Partition part = Partition::from_labels(random_labels(rng, n));
    const FlowGraph agg = FlowGraph::from_graph(g).aggregate(part);
    REQUIRE(agg.num_nodes() == part.num_modules());
    std::vector<std::uint32_t> identity(agg.num_nodes());
    for (std::uint32_t i = 0; i < identity.size(); ++i) identity[i] = i;
    REQUIRE(std::abs(codelength_bits(agg, identity) - codelength(g, part).codelength) <= 1e-9);
  }
}

TEST_CASE("normalization and entropy bounds") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 30;
    const RelationGraph g = testing::random_graph(rng, n, 0.3);
    const FlowModel f = compute_flows(g);
    double total = 0.0;
    for (double p : f.visit_rate) total += p;
    CHECK(total == doctest::Approx(1.0));
    const auto b = codelength(g, Partition::from_labels(random_labels(rng, n)));
    CHECK(b.index_entropy >= 0.0);
    CHECK(b.index_entropy <= std::log2(static_cast<double>(b.num_modules)) + 1e-12);
    for (std::size_t i = 0; i < b.num_modules; ++i) {
      CHECK(b.module_usage[i] >= 0.0);
      CHECK(b.module_usage[i] <= 1.0 + b.exit_total + 1e-12);
      CHECK(b.module_entropy[i] >= 0.0);
    }
  }
  CHECK(entropy_bits(std::vector<double>{1, 1, 1, 1}) == doctest::Approx(2.0));
  CHECK(entropy_bits(std::vector<double>{0, 5}) == 0.0);
  CHECK(plogp(0.0) == 0.0);
}

TEST_CASE("detection is deterministic for a seed") {
  std::mt19937_64 rng(3);
  const RelationGraph g = testing::random_graph(rng, 60, 0.08);
  DetectorConfig cfg;
  cfg.rng_seed = 42;
  const Detection a = detect(g, cfg);
  const Detection b = detect(g, cfg);
  CHECK(a.partition == b.partition);
  CHECK(a.breakdown.codelength == b.breakdown.codelength);
}

TEST_CASE("partition file") {
  const auto ids = testing::numbered_ids(3);
  const Partition p = Partition::from_labels(std::vector<std::uint32_t>{0, 1, 0});
  const std::string text = serialize_partition(ids, p);
  CHECK(text == "sample_id,community_id\n1,0\n2,1\n3,0\n");
  const auto [back_ids, back] = parse_partition(text);
  CHECK(back_ids == ids);
  CHECK(back == p);
  CHECK_THROWS_AS(parse_partition("sample_id,community_id\n1,x\n"), FormatError);
}
