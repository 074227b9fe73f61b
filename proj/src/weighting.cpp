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

#include "malcomm/weighting.hpp"

#include <algorithm>
#include <cmath>

#include "malcomm/error.hpp"
#include "malcomm/text_format.hpp"
#include "parallel.hpp"

namespace malcomm {

TfIdfModel compute_tfidf(const Dataset& d) {
  if (d.empty()) throw ParameterError("cannot compute tf-idf of an empty dataset");
  TfIdfModel m;
  m.n = d.size();
  m.ids = d.ids();
  for (const auto& s : d.samples) {
    for (const auto& [name, value] : s.features) ++m.doc_freq[name];
  }
  const double n = static_cast<double>(m.n);
  m.values.reserve(m.n);
  for (const auto& s : d.samples) {
    FeatureMap row;
    for (const auto& [name, tf] : s.features) {
      const double sm = static_cast<double>(m.doc_freq.find(name)->second);
      const double v = tf * std::log(n / sm);
      if (v > 0.0) row.emplace_hint(row.end(), name, v);
    }
    m.values.push_back(std::move(row));
  }
  return m;
}

std::string serialize_tfidf(const TfIdfModel& m) {
  std::string out;
  for (std::size_t j = 0; j < m.n; ++j) {
    out += "{\"id\":" + json_quote(m.ids[j]) + ",\"tfidf\":{";
    bool first = true;
    for (const auto& [name, v] : m.values[j]) {
      if (!first) out += ',';
      first = false;
      out += json_quote(name) + ':' + format_sig10(v);
    }
    out += "}}\n";
  }
  return out;
}

WeightSet WeightSet::from_pairs(std::size_t num_vertices,
                                std::span<const PairWeight> pairs) {
  std::vector<std::vector<Neighbor>> rows(num_vertices);
  for (const auto& p : pairs) {
    if (p.i == p.j) throw ParameterError("self-pair in weight set");
    if (p.i >= num_vertices || p.j >= num_vertices) {
      throw ParameterError("weight pair vertex out of range");
    }
    if (!(p.weight > 0.0)) continue;
    const auto [lo, hi] = std::minmax(p.i, p.j);
    rows[lo].push_back({hi, p.weight});
  }
  for (auto& row : rows) {
    std::sort(row.begin(), row.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
    for (std::size_t k = 1; k < row.size(); ++k) {
      if (row[k].vertex == row[k - 1].vertex) {
        throw ParameterError("repeated pair in weight set");
      }
    }
  }
  return from_upper_rows(std::move(rows));
}

WeightSet WeightSet::from_upper_rows(std::vector<std::vector<Neighbor>> rows) {
  WeightSet w(rows.size());
  std::vector<std::size_t> degree(rows.size(), 0);
  for (std::uint32_t i = 0; i < rows.size(); ++i) {
    for (const auto& nb : rows[i]) {
      ++degree[i];
      ++degree[nb.vertex];
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) w.adj_[i].reserve(degree[i]);
  // Row i contributes its lower neighbors to later rows before they append
  // their own upper part, so every list comes out sorted.
  for (std::uint32_t i = 0; i < rows.size(); ++i) {
    for (const auto& nb : rows[i]) {
      w.adj_[i].push_back(nb);
      w.adj_[nb.vertex].push_back({i, nb.weight});
      ++w.num_pairs_;
    }
    std::vector<Neighbor>().swap(rows[i]);
  }
  return w;
}

double WeightSet::weight(std::uint32_t i, std::uint32_t j) const {
  const auto& row = adj_[i];
  auto it = std::lower_bound(
      row.begin(), row.end(), j,
      [](const Neighbor& nb, std::uint32_t v) { return nb.vertex < v; });
  return it != row.end() && it->vertex == j ? it->weight : 0.0;
}

double WeightSet::min_positive() const {
  double best = 0.0;
  for (const auto& row : adj_) {
    for (const auto& nb : row) {
      if (best == 0.0 || nb.weight < best) best = nb.weight;
    }
  }
  return best;
}

double WeightSet::max_weight() const {
  double best = 0.0;
  for (const auto& row : adj_) {
    for (const auto& nb : row) best = std::max(best, nb.weight);
  }
  return best;
}

WeightSet pairwise_weights(const TfIdfModel& m, int threads) {
  const std::size_t n = m.n;

  // Feature index follows ascending name, so iterating a sample's entries
  // in index order is iterating them in name order.
  std::map<std::string_view, std::uint32_t> index;
  for (const auto& [name, df] : m.doc_freq) {
    index.emplace(name, static_cast<std::uint32_t>(index.size()));
  }
  struct Entry {
    std::uint32_t key;
    double value;
  };
  std::vector<std::vector<Entry>> by_sample(n);
  std::vector<std::vector<Entry>> postings(index.size());
  for (std::uint32_t j = 0; j < n; ++j) {
    for (const auto& [name, v] : m.values[j]) {
      const std::uint32_t f = index.find(name)->second;
      by_sample[j].push_back({f, v});
      postings[f].push_back({j, v});
    }
  }

  std::vector<std::vector<Neighbor>> rows(n);
  internal::parallel_blocks(n, threads, [&](std::size_t, std::size_t begin,
                                             std::size_t end) {
    std::vector<double> acc(n, 0.0);
    std::vector<char> touched_flag(n, 0);
    std::vector<std::uint32_t> touched;
    for (std::size_t i = begin; i < end; ++i) {
      touched.clear();
      for (const Entry& e : by_sample[i]) {
        const auto& list = postings[e.key];
        auto it = std::upper_bound(
            list.begin(), list.end(), static_cast<std::uint32_t>(i),
            [](std::uint32_t v, const Entry& p) { return v < p.key; });
        for (; it != list.end(); ++it) {
          acc[it->key] += (e.value + it->value) / 2.0;
          if (!touched_flag[it->key]) {
            touched_flag[it->key] = 1;
            touched.push_back(it->key);
          }
        }
      }
      std::sort(touched.begin(), touched.end());
      auto& row = rows[i];
      row.reserve(touched.size());
      for (std::uint32_t j : touched) {
        if (acc[j] > 0.0) row.push_back({j, acc[j]});
        acc[j] = 0.0;
        touched_flag[j] = 0;
      }
    }
  });
  return WeightSet::from_upper_rows(std::move(rows));
}

FamilySimilarityMatrix family_similarity(const Dataset& d, const WeightSet& w) {
  const std::vector<std::string> labels = d.families();
  if (w.num_vertices() != labels.size()) {
    throw ParameterError("weight set and dataset sizes differ");
  }
  FamilySimilarityMatrix out;
  out.families = labels;
  std::sort(out.families.begin(), out.families.end());
  out.families.erase(std::unique(out.families.begin(), out.families.end()),
                     out.families.end());
  const std::size_t f = out.families.size();
  std::vector<std::size_t> code(labels.size());
  std::vector<double> members(f, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    code[i] = static_cast<std::size_t>(
        std::lower_bound(out.families.begin(), out.families.end(), labels[i]) -
        out.families.begin());
    members[code[i]] += 1.0;
  }
  std::vector<std::vector<double>> sums(f, std::vector<double>(f, 0.0));
  w.for_each_pair([&](std::uint32_t i, std::uint32_t j, double wij) {
    const std::size_t a = code[i];
    const std::size_t b = code[j];
    sums[a][b] += wij;
    if (a != b) sums[b][a] += wij;
  });
  out.matrix.assign(f, std::vector<double>(f, 0.0));
  for (std::size_t a = 0; a < f; ++a) {
    for (std::size_t b = 0; b < f; ++b) {
      const double pairs =
          a == b ? members[a] * (members[a] - 1.0) / 2.0 : members[a] * members[b];
      out.matrix[a][b] = pairs > 0.0 ? sums[a][b] / pairs : 0.0;
    }
  }
  return out;
}

std::string serialize_family_similarity(const FamilySimilarityMatrix& m) {
  std::string out = "family";
  for (const auto& f : m.families) out += '\t' + f;
  out += '\n';
  for (std::size_t a = 0; a < m.families.size(); ++a) {
    out += m.families[a];
    for (double v : m.matrix[a]) out += '\t' + format_sig10(v);
    out += '\n';
  }
  return out;
}

std::vector<FeatureFrequency> feature_frequency(const Dataset& d,
                                                std::size_t top) {
  std::map<std::string, std::size_t, std::less<>> counts;
  for (const auto& s : d.samples) {
    for (const auto& [name, v] : s.features) ++counts[name];
  }
  std::vector<FeatureFrequency> out;
  out.reserve(counts.size());
  const double n = static_cast<double>(d.size());
  for (const auto& [name, c] : counts) {
    out.push_back({name, c, static_cast<double>(c) / n});
  }
  // counts is name-ordered, so a stable sort on count keeps the name tie rule.
  std::stable_sort(out.begin(), out.end(),
                   [](const FeatureFrequency& a, const FeatureFrequency& b) {
                     return a.count > b.count;
                   });
  if (out.size() > top) out.resize(top);
  return out;
}

}  // namespace malcomm
