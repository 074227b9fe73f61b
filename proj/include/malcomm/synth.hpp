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

#ifndef MALCOMM_SYNTH_HPP_
#define MALCOMM_SYNTH_HPP_

#include <cstddef>
#include <cstdint>

#include "malcomm/dataset.hpp"

namespace malcomm {

// Planted-family corpus parameters.
struct SynthConfig {
  std::size_t num_families = 13;
  std::size_t samples_per_family = 50;
  std::size_t signature_features_per_family = 10;
  std::size_t common_features = 20;
  std::size_t noise_features_per_sample = 5;
  double signature_presence_prob = 0.9;
  double cross_family_leak_prob = 0.05;
  double common_presence_prob = 0.8;
  std::uint64_t rng_seed = 7;
};

// Each sample draws its family's signatures (value 1 + Poisson(1)), the
// shared common features, a few features unique to itself, and occasional
// signatures of other families. The returned dataset carries a dictionary:
// signatures and common features are platform-defined, per-sample noise is
// app-specific. Deterministic for a fixed seed.
Dataset generate(const SynthConfig& cfg);

}  // namespace malcomm

#endif  // MALCOMM_SYNTH_HPP_
