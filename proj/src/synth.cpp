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

#include "malcomm/synth.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "malcomm/error.hpp"

namespace malcomm {

namespace {

constexpr std::array<const char*, 13> kFamilyNames = {
    "Opfake", "Plankton", "Youmi",     "Utchi",     "Basebridge",
    "Kmin",   "Iconosys", "Mseg",      "Fakedoc",   "Appquanta",
    "Geinimi", "Gingerbreak", "Smsspy"};

// mt19937_64 output is fixed by the standard; the distributions below are
// written out so the corpus does not depend on the standard library.
class Draws {
 public:
  explicit Draws(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  // Knuth's product method; fine for small means.
  int poisson(double mean) {
    const double limit = std::exp(-mean);
    int k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

 private:
  std::mt19937_64 engine_;
};

std::string padded(std::size_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*zu", width, value);
  return buf;
}

int digits(std::size_t n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParameterError(std::string(name) + " must be in [0, 1]");
  }
}

}  // namespace

Dataset generate(const SynthConfig& cfg) {
  if (cfg.num_families == 0 && cfg.samples_per_family > 0) {
    throw ParameterError("samples_per_family > 0 requires at least one family");
  }
  check_probability(cfg.signature_presence_prob, "signature_presence_prob");
  check_probability(cfg.cross_family_leak_prob, "cross_family_leak_prob");
  check_probability(cfg.common_presence_prob, "common_presence_prob");

  const std::size_t total = cfg.num_families * cfg.samples_per_family;
  const int fam_width = std::max(2, digits(cfg.num_families));
  const int sig_width = std::max(2, digits(cfg.signature_features_per_family));
  const int sample_width = std::max(5, digits(total));

  std::vector<std::string> family_names;
  std::vector<std::vector<std::string>> signatures(cfg.num_families);
  FeatureDictionary dict;
  for (std::size_t f = 0; f < cfg.num_families; ++f) {
    family_names.push_back(f < kFamilyNames.size()
                               ? std::string(kFamilyNames[f])
                               : "Family" + std::to_string(f + 1));
    for (std::size_t s = 0; s < cfg.signature_features_per_family; ++s) {
      signatures[f].push_back("api/sig_f" + padded(f, fam_width) + "_" +
                              padded(s, sig_width));
      dict.push_back({signatures[f].back(), Category::kRestrictedApi,
                      Scope::kPlatformDefined, ValueKind::kNumeric});
    }
  }
  std::vector<std::string> common;
  for (std::size_t c = 0; c < cfg.common_features; ++c) {
    common.push_back("perm/common_" + padded(c, 2));
    dict.push_back({common.back(), Category::kRequestedPermission,
                    Scope::kPlatformDefined, ValueKind::kBoolean});
  }

  Draws rng(cfg.rng_seed);
  Dataset d;
  d.samples.reserve(total);
  for (std::size_t f = 0; f < cfg.num_families; ++f) {
    for (std::size_t j = 0; j < cfg.samples_per_family; ++j) {
      Sample s;
      s.id = "s" + padded(d.samples.size(), sample_width);
      s.family = family_names[f];
      for (const auto& sig : signatures[f]) {
        if (rng.bernoulli(cfg.signature_presence_prob)) {
          s.features[sig] = 1.0 + rng.poisson(1.0);
        }
      }
      for (const auto& c : common) {
        if (rng.bernoulli(cfg.common_presence_prob)) s.features[c] = 1.0;
      }
      for (std::size_t k = 0; k < cfg.noise_features_per_sample; ++k) {
        const std::string name = "str/noise_" + s.id + "_" + std::to_string(k);
        s.features[name] = 1.0;
        dict.push_back({name, Category::kString, Scope::kAppSpecific,
                        ValueKind::kNumeric});
      }
      for (std::size_t other = 0; other < cfg.num_families; ++other) {
        if (other == f) continue;
        for (const auto& sig : signatures[other]) {
          if (rng.bernoulli(cfg.cross_family_leak_prob)) {
            s.features[sig] = 1.0 + rng.poisson(1.0);
          }
        }
      }
      d.samples.push_back(std::move(s));
    }
  }
  d.dictionary = std::move(dict);
  return d;
}

}  // namespace malcomm
