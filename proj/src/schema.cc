// Copyright 2026 The Kamino Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kamino/schema.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "absl/strings/str_cat.h"
#include "kamino/status.h"
#include "nlohmann/json.hpp"

namespace kamino {

AttributeSpec AttributeSpec::Categorical(std::string name,
                                         std::vector<std::string> values,
                                         bool ordered) {
  AttributeSpec spec;
  spec.name = std::move(name);
  spec.kind = AttributeKind::kCategorical;
  spec.categories = std::move(values);
  spec.ordered = ordered;
  return spec;
}

AttributeSpec AttributeSpec::Numerical(std::string name, double lo, double hi,
                                       int bins) {
  AttributeSpec spec;
  spec.name = std::move(name);
  spec.kind = AttributeKind::kNumerical;
  spec.lo = lo;
  spec.hi = hi;
  spec.bins = bins;
  return spec;
}

size_t AttributeSpec::DomainSize() const {
  return is_categorical() ? categories.size() : static_cast<size_t>(bins);
}

std::optional<size_t> AttributeSpec::CategoryIndex(
    std::string_view token) const {
  for (size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == token) return i;
  }
  return std::nullopt;
}

absl::StatusOr<Schema> Schema::Create(std::vector<AttributeSpec> attributes) {
  if (attributes.size() < 2) {
    return MakeError(ErrorKind::kInvalidSchema,
                     "a schema needs at least two attributes");
  }
  Schema schema;
  for (size_t i = 0; i < attributes.size(); ++i) {
    const AttributeSpec& a = attributes[i];
    if (a.name.empty()) {
      return MakeError(ErrorKind::kInvalidSchema, "empty attribute name");
    }
    if (!schema.index_.emplace(a.name, i).second) {
      return MakeError(ErrorKind::kInvalidSchema,
                       absl::StrCat("duplicate attribute '", a.name, "'"));
    }
    if (a.is_categorical()) {
      if (a.categories.empty()) {
        return MakeError(ErrorKind::kInvalidSchema,
                         absl::StrCat("'", a.name, "' has an empty domain"));
      }
      std::unordered_set<std::string> seen;
      for (const std::string& v : a.categories) {
        if (v.empty()) {
          return MakeError(ErrorKind::kInvalidSchema,
                           absl::StrCat("'", a.name, "' has an empty value"));
        }
        if (!seen.insert(v).second) {
          return MakeError(
              ErrorKind::kInvalidSchema,
              absl::StrCat("'", a.name, "' repeats value '", v, "'"));
        }
      }
    } else {
      if (!(std::isfinite(a.lo) && std::isfinite(a.hi) && a.lo < a.hi)) {
        return MakeError(ErrorKind::kInvalidSchema,
                         absl::StrCat("'", a.name, "' needs lo < hi"));
      }
      if (a.bins < 1) {
        return MakeError(ErrorKind::kInvalidSchema,
                         absl::StrCat("'", a.name, "' needs q >= 1"));
      }
    }
  }
  schema.attributes_ = std::move(attributes);
  return schema;
}

absl::StatusOr<Schema> Schema::FromJson(const nlohmann::json& json) {
  if (!json.is_object() || !json.contains("attributes") ||
      !json["attributes"].is_array()) {
    return MakeError(ErrorKind::kInvalidSchema,
                     "expected {\"attributes\": [...]}");
  }
  std::vector<AttributeSpec> attributes;
  for (const auto& item : json["attributes"]) {
    if (!item.contains("name") || !item.contains("kind") ||
        !item.contains("domain")) {
      return MakeError(ErrorKind::kInvalidSchema,
                       "attribute needs name, kind and domain");
    }
    const std::string name = item["name"].get<std::string>();
    const std::string kind = item["kind"].get<std::string>();
    const auto& domain = item["domain"];
    if (kind == "categorical") {
      if (!domain.is_array()) {
        return MakeError(ErrorKind::kInvalidSchema,
                         absl::StrCat("'", name, "': domain must be a list"));
      }
      std::vector<std::string> values;
      for (const auto& v : domain) {
        values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
      attributes.push_back(AttributeSpec::Categorical(
          name, std::move(values), item.value("ordered", false)));
    } else if (kind == "numerical") {
      if (!domain.is_object() || !domain.contains("lo") ||
          !domain.contains("hi")) {
        return MakeError(ErrorKind::kInvalidSchema,
                         absl::StrCat("'", name, "': domain needs lo and hi"));
      }
      attributes.push_back(AttributeSpec::Numerical(
          name, domain["lo"].get<double>(), domain["hi"].get<double>(),
          domain.value("q", 1)));
    } else {
      return MakeError(ErrorKind::kInvalidSchema,
                       absl::StrCat("'", name, "': unknown kind '", kind, "'"));
    }
  }
  return Create(std::move(attributes));
}

absl::StatusOr<Schema> Schema::LoadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return MakeError(ErrorKind::kIoError, absl::StrCat("cannot open ", path));
  }
  nlohmann::json json;
  try {
    in >> json;
  } catch (const nlohmann::json::exception& e) {
    return MakeError(ErrorKind::kInvalidSchema,
                     absl::StrCat(path, ": ", e.what()));
  }
  return FromJson(json);
}

nlohmann::json Schema::ToJson() const {
  nlohmann::json attrs = nlohmann::json::array();
  for (const AttributeSpec& a : attributes_) {
    nlohmann::json item = {{"name", a.name}};
    if (a.is_categorical()) {
      item["kind"] = "categorical";
      item["domain"] = a.categories;
      if (a.ordered) item["ordered"] = true;
    } else {
      item["kind"] = "numerical";
      item["domain"] = {{"lo", a.lo}, {"hi", a.hi}, {"q", a.bins}};
    }
    attrs.push_back(std::move(item));
  }
  return {{"attributes", attrs}};
}

std::optional<size_t> Schema::IndexOf(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Schema::operator==(const Schema& other) const {
  if (size() != other.size()) return false;
  for (size_t i = 0; i < size(); ++i) {
    const AttributeSpec& a = attributes_[i];
    const AttributeSpec& b = other.attributes_[i];
    if (a.name != b.name || a.kind != b.kind || a.categories != b.categories ||
        a.ordered != b.ordered || a.lo != b.lo || a.hi != b.hi ||
        a.bins != b.bins) {
      return false;
    }
  }
  return true;
}

int BinOf(double value, const AttributeSpec& spec) {
  const double width = (spec.hi - spec.lo) / spec.bins;
  int bin = static_cast<int>(std::floor((value - spec.lo) / width));
  if (bin < 0) bin = 0;
  if (bin >= spec.bins) bin = spec.bins - 1;
  return bin;
}

double DrawInBin(int zero_based_bin, const AttributeSpec& spec,
                 RandomSource& rng) {
  const double width = (spec.hi - spec.lo) / spec.bins;
  double x = spec.lo + (zero_based_bin + rng.Uniform()) * width;
  // Keep the draw inside the bin that BinOf reports despite rounding at the
  // sub-interval edges.
  while (x > spec.lo && BinOf(x, spec) > zero_based_bin) {
    x = std::nextafter(x, spec.lo);
  }
  while (x < spec.hi && BinOf(x, spec) < zero_based_bin) {
    x = std::nextafter(x, spec.hi);
  }
  return x;
}

absl::StatusOr<int> Quantize(double value, const AttributeSpec& spec) {
  if (!spec.is_numerical()) {
    return MakeError(ErrorKind::kNotNumerical,
                     absl::StrCat("'", spec.name, "' is categorical"));
  }
  if (!(value >= spec.lo && value <= spec.hi)) {
    return MakeError(ErrorKind::kOutOfRange,
                     absl::StrCat(value, " outside [", spec.lo, ", ", spec.hi,
                                  "] of '", spec.name, "'"));
  }
  return BinOf(value, spec) + 1;
}

absl::StatusOr<double> Unquantize(int bin, const AttributeSpec& spec,
                                  RandomSource& rng) {
  if (!spec.is_numerical()) {
    return MakeError(ErrorKind::kNotNumerical,
                     absl::StrCat("'", spec.name, "' is categorical"));
  }
  if (bin < 1 || bin > spec.bins) {
    return MakeError(ErrorKind::kOutOfRange,
                     absl::StrCat("bin ", bin, " outside [1, ", spec.bins,
                                  "] of '", spec.name, "'"));
  }
  return DrawInBin(bin - 1, spec, rng);
}

}  // namespace kamino
