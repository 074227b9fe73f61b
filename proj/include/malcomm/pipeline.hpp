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

#ifndef MALCOMM_PIPELINE_HPP_
#define MALCOMM_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "malcomm/dataset.hpp"
#include "malcomm/eval.hpp"
#include "malcomm/graph.hpp"
#include "malcomm/infomap.hpp"
#include "malcomm/weighting.hpp"

namespace malcomm {

struct PipelineOptions {
  std::filesystem::path input;
  std::optional<std::filesystem::path> dictionary;
  ScopeFilter scope = ScopeFilter::kAll;
  MissingFeaturePolicy missing = MissingFeaturePolicy::kError;
  GraphBuildParams graph;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
};

// Throws ParameterError for out-of-domain settings.
void validate(const PipelineOptions& opts);

struct StageTimings {
  double load_ms = 0.0;
  double filter_ms = 0.0;
  double tfidf_ms = 0.0;
  double weights_ms = 0.0;
  double graph_ms = 0.0;
  double detect_ms = 0.0;
  double eval_ms = 0.0;
};

struct GraphStats {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  double mean_degree = 0.0;
  std::size_t isolated_before_fallback = 0;
  std::size_t isolated = 0;
};

GraphStats graph_stats(const GraphBuildResult& built);

struct PipelineReport {
  PipelineOptions options;
  StageTimings timings;
  GraphStats graph;
  std::optional<Cutoff> cutoff;
  std::size_t num_samples = 0;
  double codelength_bits = 0.0;
  double q_total = 0.0;
  std::size_t num_communities = 0;
  std::optional<EvaluationReport> evaluation;
};

struct PipelineRun {
  RelationGraph graph;
  Partition partition;
  PipelineReport report;
};

// tf-idf -> weights -> graph -> detect -> eval on an already loaded (and
// filtered) dataset. Writes nothing.
PipelineRun run_on_dataset(const Dataset& d, const PipelineOptions& opts);

// Full pipeline from files: writes edges.tsv, partition.csv, report.json and,
// when every sample is labeled, eval.json and community_family.tsv.
PipelineReport run_pipeline(const PipelineOptions& opts);

std::string serialize_report(const PipelineReport& r);

// Detector JSON report: codelength_bits, num_communities, q_total, seed.
std::string serialize_detection(const Detection& det, std::uint64_t seed);

struct SweepRow {
  double value = 0.0;  // p for epsilon/en, k for knn
  GraphStats graph;
  std::size_t num_communities = 0;
  double codelength_bits = 0.0;
  std::optional<double> rs;
  std::optional<double> accuracy;
  double graph_ms = 0.0;
  double detect_ms = 0.0;
  double elapsed_ms = 0.0;  // cumulative since the sweep started
};

std::vector<double> default_p_grid();
std::vector<double> default_k_grid();

// Varies p (epsilon, en) or k (knn) over `values`, reusing one weight set.
std::vector<SweepRow> sweep(const Dataset& d, const GraphBuildParams& base,
                            const std::vector<double>& values, std::uint64_t seed);
std::string serialize_sweep(const std::vector<SweepRow>& rows, GraphMethod method);

struct BenchRow {
  std::size_t n = 0;
  std::string method;
  double median_ms = 0.0;
  std::vector<double> runs_ms;
  std::size_t edges = 0;
};

struct BenchOptions {
  std::vector<std::size_t> sizes{250, 500, 1000, 2000};
  std::size_t repeats = 5;
  double p = 10.0;
  std::size_t k = 1;
  std::uint64_t seed = 7;
  int threads = 1;
};

// Times graph construction only (weights are precomputed) for the E-N,
// full-sort k-NN and epsilon builders on synthetic corpora of each size.
std::vector<BenchRow> bench_construction(const BenchOptions& opts);
std::string serialize_bench(const std::vector<BenchRow>& rows);

}  // namespace malcomm

#endif  // MALCOMM_PIPELINE_HPP_
