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

#ifndef MALCOMM_DATASET_HPP_
#define MALCOMM_DATASET_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace malcomm {

// The eleven static feature categories FS1..FS11.
enum class Category {
  kRequestedPermission = 1,  // FS1  perm/
  kFilteredIntent,           // FS2  intent/
  kRestrictedApi,            // FS3  api/
  kComponentName,            // FS4  comp/
  kCodePattern,              // FS5  code/
  kCertificate,              // FS6  cert/
  kPayloadType,              // FS7  payload/
  kString,                   // FS8  str/
  kUsedPermission,           // FS9  uperm/
  kHardware,                 // FS10 hw/
  kSuspiciousCall,           // FS11 call/
};

enum class Scope { kPlatformDefined, kAppSpecific };
enum class ValueKind { kBoolean, kNumeric };

// Scope selector for filter_by_scope.
enum class ScopeFilter { kAll, kPlatformDefined, kAppSpecific };

// Parses "FS1".."FS11" or a short prefix tag ("perm", "str", ...).
std::optional<Category> parse_category(std::string_view tag);
std::string category_tag(Category c);     // "FS3"
std::string category_prefix(Category c);  // "api"

std::optional<Scope> parse_scope(std::string_view token);
std::string scope_name(Scope s);
std::optional<ValueKind> parse_value_kind(std::string_view token);
std::string value_kind_name(ValueKind k);
ScopeFilter parse_scope_filter(std::string_view token);

// Whether (scope, kind) is permitted for a category by the feature-set table.
bool scope_allowed(Category c, Scope s);
ValueKind category_value_kind(Category c);

// A namespaced feature name "<category>/<name>". The split is at the first
// '/', so names may themselves contain '/' (e.g. "str/http://x.com").
class FeatureId {
 public:
  // Throws FormatError when the name is not of the namespaced form.
  static FeatureId parse(std::string_view text);

  const std::string& str() const { return text_; }
  Category category() const { return category_; }
  std::string_view name() const;

  friend bool operator==(const FeatureId&, const FeatureId&) = default;
  friend auto operator<=>(const FeatureId& a, const FeatureId& b) {
    return a.text_ <=> b.text_;
  }

 private:
  FeatureId(std::string text, Category category)
      : text_(std::move(text)), category_(category) {}
  std::string text_;
  Category category_;
};

// Sparse feature vector keyed by feature name. std::map keeps iteration in
// ascending name order, which every accumulation in the library relies on.
using FeatureMap = std::map<std::string, double, std::less<>>;

struct Sample {
  std::string id;
  std::optional<std::string> family;
  FeatureMap features;  // values > 0 only

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct FeatureDictionaryEntry {
  std::string feature;
  Category category;
  Scope scope;
  ValueKind value_kind;

  friend bool operator==(const FeatureDictionaryEntry&,
                         const FeatureDictionaryEntry&) = default;
};

using FeatureDictionary = std::vector<FeatureDictionaryEntry>;

struct Dataset {
  std::vector<Sample> samples;
  std::optional<FeatureDictionary> dictionary;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  // True when every sample carries a family label.
  bool fully_labeled() const;
  std::vector<std::string> ids() const;
  // Family labels; throws FormatError if any sample is unlabeled.
  std::vector<std::string> families() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// JSON Lines reader. Errors name the 1-based line number.
Dataset parse_dataset(std::string_view text);
Dataset load_dataset(const std::filesystem::path& path);
std::string serialize_dataset(const Dataset& d);
void save_dataset(const Dataset& d, const std::filesystem::path& path);

FeatureDictionary parse_dictionary(std::string_view text);
FeatureDictionary load_dictionary(const std::filesystem::path& path);
std::string serialize_dictionary(const FeatureDictionary& dict);
void save_dictionary(const FeatureDictionary& dict,
                     const std::filesystem::path& path);

enum class MissingFeaturePolicy { kError, kTreatAsAppSpecific };

// Keeps only features whose dictionary scope matches. Samples that end up
// empty are kept; order and count never change.
Dataset filter_by_scope(
    const Dataset& d, ScopeFilter scope,
    MissingFeaturePolicy missing = MissingFeaturePolicy::kError);

}  // namespace malcomm

#endif  // MALCOMM_DATASET_HPP_
