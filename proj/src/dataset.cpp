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

#include <array>
#include <cmath>
#include <set>
#include <unordered_set>

#include "json.hpp"
#include "malcomm/error.hpp"
#include "malcomm/text_format.hpp"

namespace malcomm {

namespace {

struct CategoryInfo {
  Category category;
  const char* prefix;
  ValueKind kind;
  bool platform_ok;
  bool app_ok;
};

constexpr std::array<CategoryInfo, 11> kCategories = {{
    {Category::kRequestedPermission, "perm", ValueKind::kBoolean, true, true},
    {Category::kFilteredIntent, "intent", ValueKind::kNumeric, true, true},
    {Category::kRestrictedApi, "api", ValueKind::kNumeric, true, false},
    {Category::kComponentName, "comp", ValueKind::kBoolean, false, true},
    {Category::kCodePattern, "code", ValueKind::kBoolean, true, false},
    {Category::kCertificate, "cert", ValueKind::kBoolean, false, true},
    {Category::kPayloadType, "payload", ValueKind::kNumeric, true, false},
    {Category::kString, "str", ValueKind::kNumeric, false, true},
    {Category::kUsedPermission, "uperm", ValueKind::kBoolean, true, false},
    {Category::kHardware, "hw", ValueKind::kBoolean, true, false},
    {Category::kSuspiciousCall, "call", ValueKind::kNumeric, true, false},
}};

const CategoryInfo& info(Category c) {
  return kCategories[static_cast<int>(c) - 1];
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

nlohmann::ordered_json number_json(double v) {
  if (v == std::floor(v) && v >= 0 && v < 9007199254740992.0) {
    return static_cast<std::uint64_t>(v);
  }
  return v;
}

}  // namespace

std::optional<Category> parse_category(std::string_view tag) {
  if (tag.size() > 2 && tag.substr(0, 2) == "FS") {
    const std::string_view digits = tag.substr(2);
    int value = 0;
    for (char ch : digits) {
      if (ch < '0' || ch > '9') return std::nullopt;
      value = value * 10 + (ch - '0');
      if (value > 11) return std::nullopt;
    }
    if (digits.front() == '0' || value < 1) return std::nullopt;
    return static_cast<Category>(value);
  }
  for (const auto& c : kCategories) {
    if (tag == c.prefix) return c.category;
  }
  return std::nullopt;
}

std::string category_tag(Category c) {
  return "FS" + std::to_string(static_cast<int>(c));
}

std::string category_prefix(Category c) { return info(c).prefix; }

std::optional<Scope> parse_scope(std::string_view token) {
  if (token == "platform-defined") return Scope::kPlatformDefined;
  if (token == "app-specific") return Scope::kAppSpecific;
  return std::nullopt;
}

std::string scope_name(Scope s) {
  return s == Scope::kPlatformDefined ? "platform-defined" : "app-specific";
}

std::optional<ValueKind> parse_value_kind(std::string_view token) {
  if (token == "boolean") return ValueKind::kBoolean;
  if (token == "numeric") return ValueKind::kNumeric;
  return std::nullopt;
}

std::string value_kind_name(ValueKind k) {
  return k == ValueKind::kBoolean ? "boolean" : "numeric";
}

ScopeFilter parse_scope_filter(std::string_view token) {
  if (token == "all") return ScopeFilter::kAll;
  if (token == "platform" || token == "platform-defined") {
    return ScopeFilter::kPlatformDefined;
  }
  if (token == "app" || token == "app-specific") return ScopeFilter::kAppSpecific;
  throw ParameterError("scope must be one of all|platform|app, got '" +
                       std::string(token) + "'");
}

bool scope_allowed(Category c, Scope s) {
  return s == Scope::kPlatformDefined ? info(c).platform_ok : info(c).app_ok;
}

ValueKind category_value_kind(Category c) { return info(c).kind; }

FeatureId FeatureId::parse(std::string_view text) {
  const std::size_t slash = text.find('/');
  if (text.empty() || slash == std::string_view::npos || slash == 0 ||
      slash + 1 == text.size()) {
    throw FormatError("feature id '" + std::string(text) +
                      "' is not of the form <category>/<name>");
  }
  const auto category = parse_category(text.substr(0, slash));
  if (!category) {
    throw FormatError("feature id '" + std::string(text) +
                      "' has unknown category tag '" +
                      std::string(text.substr(0, slash)) + "'");
  }
  return FeatureId(std::string(text), *category);
}

std::string_view FeatureId::name() const {
  return std::string_view(text_).substr(text_.find('/') + 1);
}

bool Dataset::fully_labeled() const {
  for (const auto& s : samples) {
    if (!s.family) return false;
  }
  return true;
}

std::vector<std::string> Dataset::ids() const {
  std::vector<std::string> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.id);
  return out;
}

std::vector<std::string> Dataset::families() const {
  std::vector<std::string> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    if (!s.family) throw FormatError("sample '" + s.id + "' has no family label");
    out.push_back(*s.family);
  }
  return out;
}

Dataset parse_dataset(std::string_view text) {
  Dataset d;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;

    const std::string where = "line " + std::to_string(line_no) + ": ";
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(where + "malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw FormatError(where + "expected a JSON object");
    if (!obj.contains("id") || !obj["id"].is_string()) {
      throw FormatError(where + "missing string field 'id'");
    }
    Sample s;
    s.id = obj["id"].get<std::string>();
    if (s.id.empty()) throw FormatError(where + "empty sample id");
    if (!seen.insert(s.id).second) {
      throw FormatError(where + "duplicate sample id '" + s.id + "'");
    }
    if (obj.contains("family") && !obj["family"].is_null()) {
      if (!obj["family"].is_string()) {
        throw FormatError(where + "'family' must be a string or null");
      }
      s.family = obj["family"].get<std::string>();
    }
    if (!obj.contains("features") || !obj["features"].is_object()) {
      throw FormatError(where + "missing object field 'features'");
    }
    for (const auto& [name, value] : obj["features"].items()) {
      double v = 0.0;
      if (value.is_boolean()) {
        v = value.get<bool>() ? 1.0 : 0.0;
      } else if (value.is_number()) {
        v = value.get<double>();
      } else {
        throw FormatError(where + "feature '" + name + "' is not a number");
      }
      if (v < 0.0) {
        throw FormatError(where + "feature '" + name + "' has negative value");
      }
      try {
        FeatureId::parse(name);
      } catch (const FormatError& e) {
        throw FormatError(where + e.what());
      }
      if (v > 0.0) s.features.emplace(name, v);
    }
    d.samples.push_back(std::move(s));
  }
  return d;
}

Dataset load_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path));
}

std::string serialize_dataset(const Dataset& d) {
  std::string out;
  for (const auto& s : d.samples) {
    nlohmann::ordered_json obj;
    obj["id"] = s.id;
    obj["family"] = s.family ? nlohmann::ordered_json(*s.family) : nullptr;
    obj["features"] = nlohmann::ordered_json::object();
    for (const auto& [name, value] : s.features) {
      obj["features"][name] = number_json(value);
    }
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  write_file(path, serialize_dataset(d));
}

FeatureDictionary parse_dictionary(std::string_view text) {
  FeatureDictionary dict;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  std::set<std::string, std::less<>> seen;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (!header_seen) {
      if (line != "feature,category,scope,value_kind") {
        throw FormatError(where +
                          "expected header 'feature,category,scope,value_kind'");
      }
      header_seen = true;
      continue;
    }
    // The feature name may itself contain commas; the last three fields
    // are fixed tokens.
    const std::size_t c3 = line.rfind(',');
    const std::size_t c2 =
        c3 == std::string_view::npos || c3 == 0 ? std::string_view::npos
                                                 : line.rfind(',', c3 - 1);
    const std::size_t c1 =
        c2 == std::string_view::npos || c2 == 0 ? std::string_view::npos
                                                 : line.rfind(',', c2 - 1);
    if (c1 == std::string_view::npos) {
      throw FormatError(where + "expected 4 comma-separated fields");
    }
    const std::string_view feature = line.substr(0, c1);
    const std::string_view cat_tok = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string_view scope_tok = line.substr(c2 + 1, c3 - c2 - 1);
    const std::string_view kind_tok = line.substr(c3 + 1);

    FeatureId id = [&] {
      try {
        return FeatureId::parse(feature);
      } catch (const FormatError& e) {
        throw FormatError(where + e.what());
      }
    }();
    const auto category = parse_category(cat_tok);
    if (!category || cat_tok.substr(0, 2) != "FS") {
      throw FormatError(where + "unknown category '" + std::string(cat_tok) +
                        "' (expected FS1..FS11)");
    }
    const auto scope = parse_scope(scope_tok);
    if (!scope) {
      throw FormatError(where + "unknown scope '" + std::string(scope_tok) + "'");
    }
    const auto kind = parse_value_kind(kind_tok);
    if (!kind) {
      throw FormatError(where + "unknown value kind '" + std::string(kind_tok) +
                        "'");
    }
    if (id.category() != *category) {
      throw FormatError(where + "feature prefix implies " +
                        category_tag(id.category()) + " but row says " +
                        std::string(cat_tok));
    }
    if (!scope_allowed(*category, *scope)) {
      throw FormatError(where + std::string(cat_tok) + " cannot be " +
                        scope_name(*scope));
    }
    if (category_value_kind(*category) != *kind) {
      throw FormatError(where + std::string(cat_tok) + " features are " +
                        value_kind_name(category_value_kind(*category)));
    }
    if (!seen.insert(std::string(feature)).second) {
      throw FormatError(where + "duplicate feature '" + std::string(feature) + "'");
    }
    dict.push_back({std::string(feature), *category, *scope, *kind});
  }
  if (!header_seen) throw FormatError("dictionary is empty (no header)");
  return dict;
}

FeatureDictionary load_dictionary(const std::filesystem::path& path) {
  return parse_dictionary(read_file(path));
}

std::string serialize_dictionary(const FeatureDictionary& dict) {
  std::string out = "feature,category,scope,value_kind\n";
  for (const auto& e : dict) {
    out += e.feature + ',' + category_tag(e.category) + ',' +
           scope_name(e.scope) + ',' + value_kind_name(e.value_kind) + '\n';
  }
  return out;
}

void save_dictionary(const FeatureDictionary& dict,
                     const std::filesystem::path& path) {
  write_file(path, serialize_dictionary(dict));
}

Dataset filter_by_scope(const Dataset& d, ScopeFilter scope,
                        MissingFeaturePolicy missing) {
  if (scope == ScopeFilter::kAll) return d;
  if (!d.dictionary) {
    throw ParameterError("scope filtering requires a feature dictionary");
  }
  std::map<std::string, Scope, std::less<>> scopes;
  for (const auto& e : *d.dictionary) scopes.emplace(e.feature, e.scope);
  const Scope wanted = scope == ScopeFilter::kPlatformDefined
                           ? Scope::kPlatformDefined
                           : Scope::kAppSpecific;

  Dataset out;
  out.dictionary = d.dictionary;
  out.samples.reserve(d.samples.size());
  for (const auto& s : d.samples) {
    Sample kept{s.id, s.family, {}};
    for (const auto& [name, value] : s.features) {
      Scope fs = Scope::kAppSpecific;
      if (auto it = scopes.find(name); it != scopes.end()) {
        fs = it->second;
      } else if (missing == MissingFeaturePolicy::kError) {
        throw FormatError("feature '" + name + "' of sample '" + s.id +
                          "' is missing from the dictionary");
      }
      if (fs == wanted) kept.features.emplace_hint(kept.features.end(), name, value);
    }
    out.samples.push_back(std::move(kept));
  }
  return out;
}

}  // namespace malcomm
