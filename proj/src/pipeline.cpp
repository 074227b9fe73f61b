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

#include "malcomm/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "json.hpp"
#include "malcomm/error.hpp"
#include "malcomm/synth.hpp"
#include "malcomm/text_format.hpp"

namespace malcomm {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <typename Fn>
auto timed(double& ms, Fn&& fn) {
  const auto start = Clock::now();
  if constexpr (std::is_void_v<decltype(fn())>) {
    fn();
    ms = ms_since(start);
  } else {
    auto out = fn();
    ms = ms_since(start);
    return out;
  }
}

std::string scope_filter_name(ScopeFilter s) {
  switch (s) {
    case ScopeFilter::kAll: return "all";
    case ScopeFilter::kPlatformDefined: return "platform";
    case ScopeFilter::kAppSpecific: return "app";
  }
  return "?";
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

void validate(const PipelineOptions& opts) {
  const auto& g = opts.graph;
  if (!(g.p > 0.0 && g.p <= 100.0)) {
    throw ParameterError("p must be in (0, 100], got " + format_sig10(g.p));
  }
  if (g.k < 1) throw ParameterError("k must be >= 1, got " + std::to_string(g.k));
  if (g.epsilon && !(*g.epsilon >= 0.0)) {
    throw ParameterError("epsilon must be >= 0");
  }
  if (g.epsilon && g.method != GraphMethod::kEpsilon) {
    throw ParameterError("epsilon applies to the epsilon method only");
  }
  if (g.threads < 1) {
    throw ParameterError("threads must be >= 1, got " + std::to_string(g.threads));
  }
  if (opts.scope != ScopeFilter::kAll && !opts.dictionary) {
    throw ParameterError("scope filtering requires --dict");
  }
}

GraphStats graph_stats(const GraphBuildResult& built) {
  GraphStats s;
  s.vertices = built.graph.num_vertices();
  s.edges = built.graph.num_edges();
  s.mean_degree = s.vertices > 0 ? 2.0 * static_cast<double>(s.edges) /
                                       static_cast<double>(s.vertices)
                                 : 0.0;
  s.isolated_before_fallback = built.isolated_before_fallback;
  s.isolated = built.graph.num_isolated();
  return s;
}

PipelineRun run_on_dataset(const Dataset& d, const PipelineOptions& opts) {
  validate(opts);
  PipelineRun run;
  PipelineReport& r = run.report;
  r.options = opts;
  r.num_samples = d.size();

  const TfIdfModel model = timed(r.timings.tfidf_ms, [&] { return compute_tfidf(d); });
  const WeightSet w = timed(r.timings.weights_ms,
                            [&] { return pairwise_weights(model, opts.graph.threads); });
  GraphBuildResult built = timed(r.timings.graph_ms, [&] {
    return build_graph(w, model.ids, opts.graph);
  });
  r.graph = graph_stats(built);
  r.cutoff = built.cutoff;

  DetectorConfig cfg;
  cfg.rng_seed = opts.seed;
  const Detection det = timed(r.timings.detect_ms, [&] {
    if (built.graph.num_edges() == 0 && built.graph.num_vertices() > 1) {
      // No flow at all: every vertex is its own community.
      Detection trivial;
      trivial.partition = Partition::singletons(built.graph.num_vertices());
      return trivial;
    }
    return detect(built.graph, cfg);
  });
  r.codelength_bits = det.breakdown.codelength;
  r.q_total = det.breakdown.exit_total;
  r.num_communities = det.partition.num_modules();

  if (d.fully_labeled() && d.size() >= 2) {
    r.evaluation = timed(r.timings.eval_ms, [&] {
      const auto fams = d.families();
      return evaluate(fams, det.partition.assignment());
    });
  }
  run.graph = std::move(built.graph);
  run.partition = det.partition;
  return run;
}

PipelineReport run_pipeline(const PipelineOptions& opts) {
  validate(opts);
  double load_ms = 0.0;
  double filter_ms = 0.0;
  Dataset d = timed(load_ms, [&] {
    Dataset loaded = load_dataset(opts.input);
    if (opts.dictionary) loaded.dictionary = load_dictionary(*opts.dictionary);
    return loaded;
  });
  d = timed(filter_ms, [&] { return filter_by_scope(d, opts.scope, opts.missing); });
  if (d.empty()) throw FormatError("dataset " + opts.input.string() + " is empty");

  PipelineRun run = run_on_dataset(d, opts);
  run.report.timings.load_ms = load_ms;
  run.report.timings.filter_ms = filter_ms;

  const auto& out = opts.out_dir;
  write_file(out / "edges.tsv",
             serialize_edge_list(run.graph, opts.graph.method == GraphMethod::kEpsilon));
  write_file(out / "partition.csv", serialize_partition(run.graph.vertices(), run.partition));
  if (run.report.evaluation) {
    write_file(out / "eval.json", serialize_evaluation(*run.report.evaluation));
    write_file(out / "community_family.tsv", serialize_matrix_tsv(*run.report.evaluation));
  }
  write_file(out / "report.json", serialize_report(run.report));
  return run.report;
}

std::string serialize_report(const PipelineReport& r) {
  using nlohmann::ordered_json;
  const auto& o = r.options;
  ordered_json params;
  params["input"] = o.input.string();
  params["dict"] = o.dictionary ? ordered_json(o.dictionary->string()) : nullptr;
  params["scope"] = scope_filter_name(o.scope);
  params["method"] = graph_method_name(o.graph.method);
  params["p"] = o.graph.p;
  params["k"] = o.graph.k;
  params["epsilon"] = o.graph.epsilon ? ordered_json(*o.graph.epsilon) : nullptr;
  params["seed"] = o.seed;
  params["threads"] = o.graph.threads;

  ordered_json j;
  j["parameters"] = params;
  j["timings_ms"] = {{"load", r.timings.load_ms},       {"filter", r.timings.filter_ms},
                     {"tfidf", r.timings.tfidf_ms},     {"weights", r.timings.weights_ms},
                     {"graph", r.timings.graph_ms},     {"detect", r.timings.detect_ms},
                     {"eval", r.timings.eval_ms}};
  ordered_json graph = {{"vertices", r.graph.vertices},
                        {"edges", r.graph.edges},
                        {"mean_degree", r.graph.mean_degree},
                        {"isolated_before_fallback", r.graph.isolated_before_fallback},
                        {"isolated", r.graph.isolated}};
  if (r.cutoff) {
    graph["cutoff_epsilon"] = r.cutoff->epsilon;
    graph["cutoff_rank"] = r.cutoff->rank;
  }
  j["graph"] = graph;
  j["detection"] = {{"codelength_bits", r.codelength_bits},
                    {"num_communities", r.num_communities},
                    {"q_total", r.q_total},
                    {"seed", o.seed}};
  if (r.evaluation) {
    j["evaluation"] = {{"rs", r.evaluation->rand_statistic},
                       {"accuracy", r.evaluation->accuracy},
                       {"num_families", r.evaluation->num_families},
                       {"num_communities", r.evaluation->num_communities}};
  } else {
    j["evaluation"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string serialize_detection(const Detection& det, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["codelength_bits"] = det.breakdown.codelength;
  j["num_communities"] = det.partition.num_modules();
  j["q_total"] = det.breakdown.exit_total;
  j["index_entropy"] = det.breakdown.index_entropy;
  j["levels"] = det.levels;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

std::vector<double> default_p_grid() {
  std::vector<double> grid;
  for (int p = 1; p <= 20; ++p) grid.push_back(p);
  for (double p : {25.0, 30.0, 40.0}) grid.push_back(p);
  return grid;
}

std::vector<double> default_k_grid() { return {1, 2, 3, 4, 5, 6, 8, 10, 15, 20}; }

std::vector<SweepRow> sweep(const Dataset& d, const GraphBuildParams& base,
                            const std::vector<double>& values, std::uint64_t seed) {
  const auto start = Clock::now();
  const TfIdfModel model = compute_tfidf(d);
  const WeightSet w = pairwise_weights(model, base.threads);
  const bool labeled = d.fully_labeled() && d.size() >= 2;
  const std::vector<std::string> fams = labeled ? d.families() : std::vector<std::string>{};

  std::vector<SweepRow> rows;
  for (double value : values) {
    GraphBuildParams params = base;
    if (base.method == GraphMethod::kKnn) {
      if (!(value >= 1.0) || value != std::floor(value)) {
        throw ParameterError("k sweep values must be positive integers");
      }
      params.k = static_cast<std::size_t>(value);
    } else {
      params.p = value;
    }
    SweepRow row;
    row.value = value;
    GraphBuildResult built = timed(row.graph_ms, [&] {
      return build_graph(w, model.ids, params);
    });
    row.graph = graph_stats(built);
    DetectorConfig cfg;
    cfg.rng_seed = seed;
    Partition part;
    timed(row.detect_ms, [&] {
      if (built.graph.num_edges() == 0 && built.graph.num_vertices() > 1) {
        part = Partition::singletons(built.graph.num_vertices());
        return;
      }
      const Detection det = detect(built.graph, cfg);
      part = det.partition;
      row.codelength_bits = det.breakdown.codelength;
    });
    row.num_communities = part.num_modules();
    if (labeled) {
      const EvaluationReport ev = evaluate(fams, part.assignment());
      row.rs = ev.rand_statistic;
      row.accuracy = ev.accuracy;
    }
    row.elapsed_ms = ms_since(start);
    rows.push_back(row);
  }
  return rows;
}

std::string serialize_sweep(const std::vector<SweepRow>& rows, GraphMethod method) {
  std::string out = method == GraphMethod::kKnn ? "k" : "p";
  out +=
      "\tedges\tmean_degree\tisolated_before_fallback\tcommunities\tcodelength_bits"
      "\trs\taccuracy\tgraph_ms\tdetect_ms\telapsed_ms\n";
  for (const auto& r : rows) {
    out += format_sig10(r.value) + '\t' + std::to_string(r.graph.edges) + '\t' +
           format_sig10(r.graph.mean_degree) + '\t' +
           std::to_string(r.graph.isolated_before_fallback) + '\t' +
           std::to_string(r.num_communities) + '\t' + format_sig10(r.codelength_bits) +
           '\t' + (r.rs ? format_sig10(*r.rs) : "NA") + '\t' +
           (r.accuracy ? format_sig10(*r.accuracy) : "NA") + '\t' +
           format_sig10(r.graph_ms) + '\t' + format_sig10(r.detect_ms) + '\t' +
           format_sig10(r.elapsed_ms) + '\n';
  }
  return out;
}

std::vector<BenchRow> bench_construction(const BenchOptions& opts) {
  if (opts.repeats < 1) throw ParameterError("bench needs at least one repeat");
  std::vector<BenchRow> rows;
  for (std::size_t n : opts.sizes) {
    SynthConfig cfg;
    cfg.rng_seed = opts.seed;
    cfg.samples_per_family = (n + cfg.num_families - 1) / cfg.num_families;
    Dataset d = generate(cfg);
    d.samples.resize(n);
    const TfIdfModel model = compute_tfidf(d);
    const WeightSet w = pairwise_weights(model, opts.threads);

    const auto measure = [&](const std::string& name, auto&& build) {
      BenchRow row;
      row.n = n;
      row.method = name;
      for (std::size_t rep = 0; rep < opts.repeats; ++rep) {
        const auto start = Clock::now();
        const RelationGraph g = build();
        row.runs_ms.push_back(ms_since(start));
        row.edges = g.num_edges();
      }
      row.median_ms = median(row.runs_ms);
      rows.push_back(std::move(row));
    };
    measure("en", [&] { return build_en(w, model.ids, opts.p, opts.k, nullptr, opts.threads); });
    measure("knn_fullsort", [&] {
      return build_knn(w, model.ids, opts.k, NeighborSelection::kFullSort, opts.threads);
    });
    measure("epsilon", [&] {
      return build_epsilon(w, model.ids, percentile_cutoff(w, opts.p).epsilon);
    });
  }
  return rows;
}

std::string serialize_bench(const std::vector<BenchRow>& rows) {
  std::string out = "n\tmethod\tedges\tmedian_ms\truns_ms\n";
  for (const auto& r : rows) {
    std::string runs;
    for (double x : r.runs_ms) {
      if (!runs.empty()) runs += ',';
      runs += format_sig10(x);
    }
    out += std::to_string(r.n) + '\t' + r.method + '\t' + std::to_string(r.edges) + '\t' +
           format_sig10(r.median_ms) + '\t' + runs + '\n';
  }
  return out;
}

}  // namespace malcomm
