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

// Command-line front end: one subcommand per pipeline stage plus the full
// pipeline, parameter sweeps and the construction-time benchmark.
//
// Exit codes: 0 success, 1 I/O or format error, 2 invalid parameters.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <unordered_map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "malcomm/dataset.hpp"
#include "malcomm/error.hpp"
#include "malcomm/eval.hpp"
#include "malcomm/graph.hpp"
#include "malcomm/infomap.hpp"
#include "malcomm/kmeans.hpp"
#include "malcomm/pipeline.hpp"
#include "malcomm/synth.hpp"
#include "malcomm/text_format.hpp"
#include "malcomm/weighting.hpp"

namespace fs = std::filesystem;
using namespace malcomm;

namespace {

struct DataFlags {
  std::string input;
  std::string dict;
  std::string scope = "all";
  bool missing_as_app = false;
};

struct GraphFlags {
  std::string method = "en";
  double p = 10.0;
  std::size_t k = 1;
  std::optional<double> epsilon;
  int threads = 1;
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--input", f.input, "Dataset (JSON Lines)")->required();
  cmd->add_option("--dict", f.dict, "Feature dictionary (CSV)");
  cmd->add_option("--scope", f.scope, "Feature scope: all|platform|app");
  cmd->add_flag("--missing-as-app", f.missing_as_app,
                "Treat features absent from the dictionary as app-specific");
}

void add_graph_flags(CLI::App* cmd, GraphFlags& f) {
  cmd->add_option("--method", f.method, "Graph method: epsilon|knn|en");
  cmd->add_option("--p", f.p, "Top percentage of weights kept as edges");
  cmd->add_option("--k", f.k, "Nearest neighbors per vertex");
  cmd->add_option("--epsilon", f.epsilon, "Explicit weight threshold (epsilon method)");
  cmd->add_option("--threads", f.threads, "Worker threads");
}

Dataset load(const DataFlags& f) {
  Dataset d = load_dataset(f.input);
  if (!f.dict.empty()) d.dictionary = load_dictionary(f.dict);
  const ScopeFilter scope = parse_scope_filter(f.scope);
  if (scope != ScopeFilter::kAll && !d.dictionary) {
    throw ParameterError("--scope " + f.scope + " requires --dict");
  }
  return filter_by_scope(d, scope,
                         f.missing_as_app ? MissingFeaturePolicy::kTreatAsAppSpecific
                                          : MissingFeaturePolicy::kError);
}

GraphBuildParams graph_params(const GraphFlags& f) {
  GraphBuildParams g;
  g.method = parse_graph_method(f.method);
  g.p = f.p;
  g.k = f.k;
  g.epsilon = f.epsilon;
  g.threads = f.threads;
  if (!(g.p > 0.0 && g.p <= 100.0)) {
    throw ParameterError("p must be in (0, 100], got " + format_sig10(g.p));
  }
  if (g.k < 1) throw ParameterError("k must be >= 1");
  if (g.threads < 1) throw ParameterError("threads must be >= 1");
  return g;
}

// Writes to out_dir/name, or to stdout when no directory was given.
void emit(const std::string& out_dir, const std::string& name,
          const std::string& contents) {
  if (out_dir.empty()) {
    std::cout << contents;
  } else {
    write_file(fs::path(out_dir) / name, contents);
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : split(text, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParameterError("bad list value '" + tok + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Malware-app community detection pipeline"};
  app.require_subcommand(1);

  // synth
  SynthConfig synth_cfg;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a planted-family corpus");
  synth->add_option("--out-dir", synth_out, "Output directory")->required();
  synth->add_option("--families", synth_cfg.num_families, "Number of families");
  synth->add_option("--samples-per-family", synth_cfg.samples_per_family,
                    "Samples per family");
  synth->add_option("--signatures", synth_cfg.signature_features_per_family,
                    "Signature features per family");
  synth->add_option("--common", synth_cfg.common_features, "Common features");
  synth->add_option("--noise", synth_cfg.noise_features_per_sample,
                    "Unique noise features per sample");
  synth->add_option("--presence", synth_cfg.signature_presence_prob,
                    "Signature presence probability");
  synth->add_option("--leak", synth_cfg.cross_family_leak_prob,
                    "Cross-family signature leak probability");
  synth->add_option("--seed", synth_cfg.rng_seed, "RNG seed");

  // tfidf
  DataFlags tfidf_data;
  std::string tfidf_out;
  auto* tfidf = app.add_subcommand("tfidf", "Dump tf-idf values");
  add_data_flags(tfidf, tfidf_data);
  tfidf->add_option("--out-dir", tfidf_out, "Output directory (default stdout)");

  // graph
  DataFlags graph_data;
  GraphFlags graph_flags;
  std::string graph_out;
  auto* graph = app.add_subcommand("graph", "Build the relation graph");
  add_data_flags(graph, graph_data);
  add_graph_flags(graph, graph_flags);
  graph->add_option("--out-dir", graph_out, "Output directory (default stdout)");

  // detect
  std::string detect_in;
  std::string detect_out;
  std::uint64_t detect_seed = 0;
  auto* det = app.add_subcommand("detect", "Map-equation community detection");
  det->add_option("--input", detect_in, "Edge list (TSV)")->required();
  det->add_option("--seed", detect_seed, "RNG seed");
  det->add_option("--out-dir", detect_out, "Output directory")->required();

  // kmeans
  DataFlags km_data;
  std::optional<std::size_t> km_c;
  std::uint64_t km_seed = 0;
  std::string km_out;
  auto* km = app.add_subcommand("kmeans", "k-means baseline on tf-idf vectors");
  add_data_flags(km, km_data);
  km->add_option("--c", km_c, "Cluster count (default: families + 1)");
  km->add_option("--seed", km_seed, "RNG seed");
  km->add_option("--out-dir", km_out, "Output directory")->required();

  // eval
  DataFlags eval_data;
  std::string eval_partition;
  std::string eval_out;
  auto* ev = app.add_subcommand("eval", "Evaluate a partition against families");
  add_data_flags(ev, eval_data);
  ev->add_option("--partition", eval_partition, "Partition CSV")->required();
  ev->add_option("--out-dir", eval_out, "Output directory (default stdout)");

  // stats
  DataFlags stats_data;
  std::size_t stats_top = 12;
  std::string stats_out;
  auto* stats = app.add_subcommand("stats", "Most frequent features");
  add_data_flags(stats, stats_data);
  stats->add_option("--top", stats_top, "Number of features");
  stats->add_option("--out-dir", stats_out, "Output directory (default stdout)");

  // family-sim
  DataFlags fsim_data;
  int fsim_threads = 1;
  std::string fsim_out;
  auto* fsim = app.add_subcommand("family-sim", "Mean pair weight between families");
  add_data_flags(fsim, fsim_data);
  fsim->add_option("--threads", fsim_threads, "Worker threads");
  fsim->add_option("--out-dir", fsim_out, "Output directory (default stdout)");

  // sweep
  DataFlags sweep_data;
  GraphFlags sweep_flags;
  std::string sweep_values;
  std::uint64_t sweep_seed = 0;
  std::string sweep_out;
  auto* sw = app.add_subcommand("sweep", "Sweep p (epsilon/en) or k (knn)");
  add_data_flags(sw, sweep_data);
  add_graph_flags(sw, sweep_flags);
  sw->add_option("--values", sweep_values, "Comma-separated grid (default per method)");
  sw->add_option("--seed", sweep_seed, "RNG seed");
  sw->add_option("--out-dir", sweep_out, "Output directory (default stdout)");

  // bench
  BenchOptions bench_opts;
  std::string bench_sizes;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "Time graph construction");
  bench->add_option("--sizes", bench_sizes, "Comma-separated sample counts");
  bench->add_option("--repeats", bench_opts.repeats, "Runs per measurement");
  bench->add_option("--p", bench_opts.p, "Top percentage for E-N / epsilon");
  bench->add_option("--k", bench_opts.k, "Nearest neighbors");
  bench->add_option("--seed", bench_opts.seed, "RNG seed");
  bench->add_option("--threads", bench_opts.threads, "Worker threads");
  bench->add_option("--out-dir", bench_out, "Output directory (default stdout)");

  // pipeline
  DataFlags pipe_data;
  GraphFlags pipe_flags;
  std::uint64_t pipe_seed = 0;
  std::string pipe_out;
  auto* pipe = app.add_subcommand("pipeline", "Run every stage end to end");
  add_data_flags(pipe, pipe_data);
  add_graph_flags(pipe, pipe_flags);
  pipe->add_option("--seed", pipe_seed, "RNG seed");
  pipe->add_option("--out-dir", pipe_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*synth) {
      const Dataset d = generate(synth_cfg);
      save_dataset(d, fs::path(synth_out) / "dataset.jsonl");
      save_dictionary(*d.dictionary, fs::path(synth_out) / "dictionary.csv");
    } else if (*tfidf) {
      emit(tfidf_out, "tfidf.jsonl", serialize_tfidf(compute_tfidf(load(tfidf_data))));
    } else if (*graph) {
      const GraphBuildParams params = graph_params(graph_flags);
      const Dataset d = load(graph_data);
      const TfIdfModel model = compute_tfidf(d);
      const WeightSet w = pairwise_weights(model, params.threads);
      const GraphBuildResult built = build_graph(w, model.ids, params);
      emit(graph_out, "edges.tsv",
           serialize_edge_list(built.graph, params.method == GraphMethod::kEpsilon));
    } else if (*det) {
      const RelationGraph g = parse_edge_list(read_file(detect_in));
      DetectorConfig cfg;
      cfg.rng_seed = detect_seed;
      const Detection result = detect(g, cfg);
      write_file(fs::path(detect_out) / "partition.csv",
                 serialize_partition(g.vertices(), result.partition));
      write_file(fs::path(detect_out) / "detect.json",
                 serialize_detection(result, detect_seed));
    } else if (*km) {
      const Dataset d = load(km_data);
      KMeansConfig cfg;
      cfg.rng_seed = km_seed;
      if (km_c) {
        cfg.c = *km_c;
      } else {
        if (!d.fully_labeled()) {
          throw ParameterError("--c is required for unlabeled datasets");
        }
        const auto fams = d.families();
        cfg.c = encode_labels(fams).names.size() + 1;
      }
      const TfIdfModel model = compute_tfidf(d);
      const KMeansResult r = kmeans(model, cfg);
      const Partition part = Partition::from_labels(r.assignment);
      write_file(fs::path(km_out) / "partition.csv", serialize_partition(model.ids, part));
      nlohmann::ordered_json j;
      j["c"] = cfg.c;
      j["seed"] = cfg.rng_seed;
      j["objective"] = r.objective;
      j["iterations"] = r.iterations;
      write_file(fs::path(km_out) / "kmeans.json", j.dump(2) + "\n");
    } else if (*ev) {
      const Dataset d = load(eval_data);
      const auto [ids, part] = parse_partition(read_file(eval_partition));
      std::unordered_map<std::string, std::uint32_t> community;
      for (std::size_t i = 0; i < ids.size(); ++i) community.emplace(ids[i], part[i]);
      if (community.size() != ids.size() || ids.size() != d.size()) {
        throw FormatError("partition does not list each dataset sample exactly once");
      }
      std::vector<std::uint32_t> labels;
      for (const auto& s : d.samples) {
        const auto it = community.find(s.id);
        if (it == community.end()) {
          throw FormatError("sample '" + s.id + "' is missing from the partition");
        }
        labels.push_back(it->second);
      }
      const auto fams = d.families();
      const EvaluationReport r = evaluate(fams, labels);
      emit(eval_out, "eval.json", serialize_evaluation(r));
      if (!eval_out.empty()) {
        write_file(fs::path(eval_out) / "community_family.tsv", serialize_matrix_tsv(r));
      }
    } else if (*stats) {
      const Dataset d = load(stats_data);
      nlohmann::ordered_json j;
      j["num_samples"] = d.size();
      j["top_features"] = nlohmann::ordered_json::array();
      for (const auto& f : feature_frequency(d, stats_top)) {
        j["top_features"].push_back(
            {{"feature", f.feature}, {"count", f.count}, {"fraction", f.fraction}});
      }
      emit(stats_out, "stats.json", j.dump(2) + "\n");
    } else if (*fsim) {
      if (fsim_threads < 1) throw ParameterError("threads must be >= 1");
      const Dataset d = load(fsim_data);
      const WeightSet w = pairwise_weights(compute_tfidf(d), fsim_threads);
      emit(fsim_out, "family_similarity.tsv",
           serialize_family_similarity(family_similarity(d, w)));
    } else if (*sw) {
      const GraphBuildParams params = graph_params(sweep_flags);
      const std::vector<double> values =
          !sweep_values.empty() ? parse_list(sweep_values)
          : params.method == GraphMethod::kKnn ? default_k_grid()
                                               : default_p_grid();
      const Dataset d = load(sweep_data);
      emit(sweep_out, "sweep.tsv",
           serialize_sweep(sweep(d, params, values, sweep_seed), params.method));
    } else if (*bench) {
      if (!bench_sizes.empty()) {
        bench_opts.sizes.clear();
        for (double x : parse_list(bench_sizes)) {
          if (!(x >= 2.0)) throw ParameterError("bench sizes must be >= 2");
          bench_opts.sizes.push_back(static_cast<std::size_t>(x));
        }
      }
      emit(bench_out, "bench.tsv", serialize_bench(bench_construction(bench_opts)));
    } else if (*pipe) {
      PipelineOptions opts;
      opts.input = pipe_data.input;
      if (!pipe_data.dict.empty()) opts.dictionary = pipe_data.dict;
      opts.scope = parse_scope_filter(pipe_data.scope);
      opts.missing = pipe_data.missing_as_app ? MissingFeaturePolicy::kTreatAsAppSpecific
                                              : MissingFeaturePolicy::kError;
      opts.graph = graph_params(pipe_flags);
      opts.seed = pipe_seed;
      opts.out_dir = pipe_out;
      run_pipeline(opts);
    }
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
