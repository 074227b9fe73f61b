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

#include "malcomm/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "malcomm/error.hpp"

namespace malcomm {

namespace {

struct SparseRow {
  std::vector<std::uint32_t> index;
  std::vector<double> value;
  double norm2 = 0.0;
};

double dot(const SparseRow& x, const std::vector<double>& center) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.index.size(); ++k) s += x.value[k] * center[x.index[k]];
  return s;
}

double norm2(const std::vector<double>& c) {
  double s = 0.0;
  for (double v : c) s += v * v;
  return s;
}

// ||x - c||^2 = ||x||^2 - 2 x.c + ||c||^2, clamped at 0.
double distance2(const SparseRow& x, const std::vector<double>& c, double c_norm2) {
  return std::max(0.0, x.norm2 - 2.0 * dot(x, c) + c_norm2);
}

std::vector<double> densify(const SparseRow& x, std::size_t dims) {
  std::vector<double> out(dims, 0.0);
  for (std::size_t k = 0; k < x.index.size(); ++k) out[x.index[k]] = x.value[k];
  return out;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

KMeansResult kmeans(const TfIdfModel& m, const KMeansConfig& cfg) {
  const std::size_t n = m.n;
  if (cfg.c < 1 || cfg.c > n) {
    throw ParameterError("k-means needs 1 <= c <= n (n = " + std::to_string(n) +
                         "), got c = " + std::to_string(cfg.c));
  }
  KMeansResult r;
  std::map<std::string_view, std::uint32_t> index;
  for (const auto& [name, df] : m.doc_freq) {
    if (df < n) index.emplace(name, static_cast<std::uint32_t>(index.size()));
  }
  for (const auto& [name, i] : index) r.features.emplace_back(name);
  const std::size_t dims = index.size();

  std::vector<SparseRow> rows(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& [name, v] : m.values[j]) {
      rows[j].index.push_back(index.find(name)->second);
      rows[j].value.push_back(v);
      rows[j].norm2 += v * v;
    }
  }

  // k-means++ seeding.
  std::mt19937_64 rng(cfg.rng_seed);
  std::vector<std::size_t> seeds;
  std::vector<char> chosen(n, 0);
  seeds.push_back(static_cast<std::size_t>(rng() % n));
  chosen[seeds.back()] = 1;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (seeds.size() < cfg.c) {
    const auto last = densify(rows[seeds.back()], dims);
    const double last_norm = norm2(last);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      nearest[j] = std::min(nearest[j], distance2(rows[j], last, last_norm));
      if (!chosen[j]) total += nearest[j];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      double target = uniform01(rng) * total;
      for (std::size_t j = 0; j < n; ++j) {
        if (chosen[j] || nearest[j] <= 0.0) continue;
        pick = j;
        target -= nearest[j];
        if (target < 0.0) break;
      }
    }
    if (pick == n) {
      // Every remaining point coincides with a center: pick uniformly.
      std::vector<std::size_t> rest;
      for (std::size_t j = 0; j < n; ++j) {
        if (!chosen[j]) rest.push_back(j);
      }
      pick = rest[static_cast<std::size_t>(rng() % rest.size())];
    }
    seeds.push_back(pick);
    chosen[pick] = 1;
  }
  r.centers.reserve(cfg.c);
  for (std::size_t s : seeds) r.centers.push_back(densify(rows[s], dims));

  r.assignment.assign(n, 0);
  std::vector<double> dist(n, 0.0);
  std::vector<double> center_norm(cfg.c);
  const auto assign = [&] {
    for (std::size_t k = 0; k < cfg.c; ++k) center_norm[k] = norm2(r.centers[k]);
    double objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t best_k = 0;
      for (std::uint32_t k = 0; k < cfg.c; ++k) {
        const double d = distance2(rows[j], r.centers[k], center_norm[k]);
        if (d < best) {
          best = d;
          best_k = k;
        }
      }
      r.assignment[j] = best_k;
      dist[j] = best;
      objective += best;
    }
    return objective;
  };
  // Recomputes centers as member means (sums in ascending sample order) and
  // refills empty clusters. Returns the objective for the new centers.
  const auto update = [&] {
    std::vector<std::size_t> count(cfg.c, 0);
    for (std::size_t j = 0; j < n; ++j) ++count[r.assignment[j]];
    for (std::size_t k = 0; k < cfg.c; ++k) {
      if (count[k] > 0) continue;
      std::size_t far = n;
      for (std::size_t j = 0; j < n; ++j) {
        if (count[r.assignment[j]] < 2) continue;
        if (far == n || dist[j] > dist[far]) far = j;
      }
      --count[r.assignment[far]];
      r.assignment[far] = static_cast<std::uint32_t>(k);
      dist[far] = 0.0;
      count[k] = 1;
    }
    for (auto& c : r.centers) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      auto& c = r.centers[r.assignment[j]];
      for (std::size_t t = 0; t < rows[j].index.size(); ++t) {
        c[rows[j].index[t]] += rows[j].value[t];
      }
    }
    for (std::size_t k = 0; k < cfg.c; ++k) {
      for (double& v : r.centers[k]) v /= static_cast<double>(count[k]);
      center_norm[k] = norm2(r.centers[k]);
    }
    double objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      dist[j] = distance2(rows[j], r.centers[r.assignment[j]],
                          center_norm[r.assignment[j]]);
      objective += dist[j];
    }
    return objective;
  };

  const auto has_empty = [&] {
    std::vector<char> used(cfg.c, 0);
    for (std::uint32_t k : r.assignment) used[k] = 1;
    return std::find(used.begin(), used.end(), 0) != used.end();
  };

  double previous = assign();
  r.objective = previous;
  while (r.iterations < cfg.max_iterations) {
    update();
    const double current = assign();
    ++r.iterations;
    r.objective_history.push_back(current);
    r.objective = current;
    const double gain = previous - current;
    if (gain <= cfg.tolerance * std::max(previous, std::numeric_limits<double>::min())) {
      break;
    }
    previous = current;
  }
  // The last assignment step can empty a cluster; reseed until it cannot.
  for (int guard = 0; guard < 16 && has_empty(); ++guard) {
    update();
    r.objective = assign();
  }
  return r;
}

}  // namespace malcomm
