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

#include "malcomm/dataset.hpp"

#include <random>

#include "doctest.h"
#include "malcomm/error.hpp"
#include "malcomm/synth.hpp"

using namespace malcomm;

TEST_CASE("parse a labeled sample") {
  const Dataset d = parse_dataset(
      R"({"id":"s1","family":"Opfake","features":{"perm/INTERNET":1}})");
  REQUIRE(d.size() == 1);
  CHECK(d.samples[0].id == "s1");
  CHECK(d.samples[0].family == "Opfake");
  CHECK(d.samples[0].features.size() == 1);
  CHECK(d.samples[0].features.at("perm/INTERNET") == 1.0);
}

TEST_CASE("empty feature map and null family are valid") {
  const Dataset d = parse_dataset(
      "{\"id\":\"a\",\"family\":null,\"features\":{}}\n"
      "{\"id\":\"b\",\"features\":{\"str/x\":0,\"api/y\":2.5}}\n");
  REQUIRE(d.size() == 2);
  CHECK(d.samples[0].features.empty());
  CHECK_FALSE(d.samples[0].family.has_value());
  // Zero values are dropped.
  CHECK(d.samples[1].features.size() == 1);
  CHECK_FALSE(d.fully_labeled());
}

TEST_CASE("loader errors") {
  SUBCASE("duplicate id") {
    CHECK_THROWS_WITH_AS(parse_dataset("{\"id\":\"s1\",\"features\":{}}\n"
                                       "{\"id\":\"s1\",\"features\":{}}\n"),
                         doctest::Contains("line 2: duplicate sample id"),
                         FormatError);
  }
  SUBCASE("malformed line names its number") {
    CHECK_THROWS_WITH_AS(parse_dataset("{\"id\":\"a\",\"features\":{}}\n\n{oops\n"),
                         doctest::Contains("line 3"), FormatError);
  }
  SUBCASE("negative value") {
    CHECK_THROWS_AS(parse_dataset(R"({"id":"a","features":{"api/x":-1}})"), FormatError);
  }
  SUBCASE("feature without category") {
    CHECK_THROWS_AS(parse_dataset(R"({"id":"a","features":{"INTERNET":1}})"), FormatError);
    CHECK_THROWS_AS(parse_dataset(R"({"id":"a","features":{"bogus/x":1}})"), FormatError);
  }
  SUBCASE("missing features object") {
    CHECK_THROWS_AS(parse_dataset(R"({"id":"a"})"), FormatError);
  }
}

TEST_CASE("feature ids split at the first slash") {
  const FeatureId f = FeatureId::parse("str/http://x.com");
  CHECK(f.category() == Category::kString);
  CHECK(f.name() == "http://x.com");
  CHECK(FeatureId::parse("FS3/getDeviceId").category() == Category::kRestrictedApi);
  CHECK_THROWS_AS(FeatureId::parse("perm/"), FormatError);
  CHECK_THROWS_AS(FeatureId::parse("/x"), FormatError);
}

TEST_CASE("dictionary rows") {
  const auto dict = parse_dictionary(
      "feature,category,scope,value_kind\n"
      "perm/INTERNET,FS1,platform-defined,boolean\n"
      "str/http://x.com,FS8,app-specific,numeric\n");
  REQUIRE(dict.size() == 2);
  CHECK(dict[0] == FeatureDictionaryEntry{"perm/INTERNET", Category::kRequestedPermission,
                                          Scope::kPlatformDefined, ValueKind::kBoolean});
  CHECK(dict[1].category == Category::kString);
  CHECK(dict[1].scope == Scope::kAppSpecific);

  const std::string header = "feature,category,scope,value_kind\n";
  CHECK_THROWS_WITH_AS(parse_dictionary(header + "perm/X,FS12,platform-defined,boolean\n"),
                       doctest::Contains("unknown category"), FormatError);
  CHECK_THROWS_WITH_AS(parse_dictionary(header + "perm/X,FS1,system,boolean\n"),
                       doctest::Contains("unknown scope"), FormatError);
  // Strings are app-specific only; API calls are numeric.
  CHECK_THROWS_AS(parse_dictionary(header + "str/x,FS8,platform-defined,numeric\n"),
                  FormatError);
  CHECK_THROWS_AS(parse_dictionary(header + "api/x,FS3,platform-defined,boolean\n"),
                  FormatError);
  CHECK_THROWS_AS(parse_dictionary("feature,scope\n"), FormatError);
}

TEST_CASE("filter_by_scope") {
  Dataset d = parse_dataset(R"({"id":"a","features":{"perm/INTERNET":1,"str/foo":2}})");
  d.dictionary = parse_dictionary(
      "feature,category,scope,value_kind\n"
      "perm/INTERNET,FS1,platform-defined,boolean\n"
      "str/foo,FS8,app-specific,numeric\n");

  CHECK(filter_by_scope(d, ScopeFilter::kAll) == d);
  const Dataset platform = filter_by_scope(d, ScopeFilter::kPlatformDefined);
  CHECK(platform.samples[0].features == FeatureMap{{"perm/INTERNET", 1.0}});
  const Dataset app = filter_by_scope(d, ScopeFilter::kAppSpecific);
  CHECK(app.samples[0].features == FeatureMap{{"str/foo", 2.0}});

  SUBCASE("errors") {
    Dataset bare = d;
    bare.dictionary.reset();
    CHECK_THROWS_AS(filter_by_scope(bare, ScopeFilter::kPlatformDefined), ParameterError);
    Dataset extra = parse_dataset(R"({"id":"a","features":{"api/unknown":1}})");
    extra.dictionary = d.dictionary;
    CHECK_THROWS_AS(filter_by_scope(extra, ScopeFilter::kAppSpecific), FormatError);
    const Dataset lenient = filter_by_scope(extra, ScopeFilter::kAppSpecific,
                                            MissingFeaturePolicy::kTreatAsAppSpecific);
    CHECK(lenient.samples[0].features.size() == 1);
  }
}

TEST_CASE("all app-specific corpus filtered to platform leaves empty samples") {
  SynthConfig cfg;
  cfg.num_families = 2;
  cfg.samples_per_family = 3;
  cfg.signature_features_per_family = 0;
  cfg.common_features = 0;
  cfg.noise_features_per_sample = 3;
  const Dataset d = generate(cfg);
  const Dataset platform = filter_by_scope(d, ScopeFilter::kPlatformDefined);
  REQUIRE(platform.size() == d.size());
  for (const auto& s : platform.samples) CHECK(s.features.empty());
}

TEST_CASE("scope filters partition every feature map and keep sample order") {
  SynthConfig cfg;
  cfg.num_families = 4;
  cfg.samples_per_family = 10;
  cfg.rng_seed = 3;
  const Dataset d = generate(cfg);
  const Dataset platform = filter_by_scope(d, ScopeFilter::kPlatformDefined);
  const Dataset app = filter_by_scope(d, ScopeFilter::kAppSpecific);
  REQUIRE(platform.size() == d.size());
  REQUIRE(app.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(platform.samples[i].id == d.samples[i].id);
    CHECK(app.samples[i].id == d.samples[i].id);
    FeatureMap merged = platform.samples[i].features;
    for (const auto& [name, v] : app.samples[i].features) {
      CHECK(merged.emplace(name, v).second);  // disjoint
    }
    CHECK(merged == d.samples[i].features);
  }
}

TEST_CASE("save then load is the identity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> value(0.001, 1000.0);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset d;
    for (int s = 0; s < 15; ++s) {
      Sample sample;
      sample.id = "id \"" + std::to_string(trial) + "/" + std::to_string(s);
      if (rng() % 3) sample.family = "fam" + std::to_string(rng() % 4);
      const int nf = static_cast<int>(rng() % 6);
      for (int f = 0; f < nf; ++f) {
        const double v = rng() % 2 ? std::floor(value(rng)) + 1.0 : value(rng);
        sample.features["str/f" + std::to_string(rng() % 50)] = v;
      }
      d.samples.push_back(sample);
    }
    CHECK(parse_dataset(serialize_dataset(d)) == d);
  }
}

TEST_CASE("dictionary round-trip") {
  SynthConfig cfg;
  cfg.num_families = 3;
  cfg.samples_per_family = 2;
  const Dataset d = generate(cfg);
  CHECK(parse_dictionary(serialize_dictionary(*d.dictionary)) == *d.dictionary);
}
