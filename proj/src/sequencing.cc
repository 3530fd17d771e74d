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

#include "kamino/sequencing.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "kamino/status.h"
#include "kamino/violations.h"
#include "nlohmann/json.hpp"

namespace kamino {

std::vector<std::vector<size_t>> SchemaSequence::Units() const {
  std::vector<std::vector<size_t>> units;
  for (size_t p = 0; p < order.size();) {
    const std::vector<size_t>* group = nullptr;
    for (const auto& g : groups) {
      if (!g.empty() && g.front() == order[p]) group = &g;
    }
    if (group != nullptr) {
      units.push_back(*group);
      p += group->size();
    } else {
      units.push_back({order[p]});
      ++p;
    }
  }
  return units;
}

bool SchemaSequence::IsFallback(size_t attr) const {
  return std::find(fallback.begin(), fallback.end(), attr) != fallback.end();
}

nlohmann::json SchemaSequence::ToJson(const Schema& schema) const {
  auto names = [&](const std::vector<size_t>& attrs) {
    nlohmann::json list = nlohmann::json::array();
    for (size_t a : attrs) list.push_back(schema.attribute(a).name);
    return list;
  };
  nlohmann::json json;
  json["order"] = names(order);
  json["groups"] = nlohmann::json::array();
  for (const auto& g : groups) json["groups"].push_back(names(g));
  json["fallback"] = names(fallback);
  return json;
}

absl::StatusOr<SchemaSequence> SchemaSequence::FromJson(
    const nlohmann::json& json, const Schema& schema) {
  auto indices =
      [&](const nlohmann::json& list) -> absl::StatusOr<std::vector<size_t>> {
    std::vector<size_t> out;
    if (!list.is_array()) {
      return MakeError(ErrorKind::kInvalidOrder, "expected a list of names");
    }
    for (const auto& item : list) {
      if (!item.is_string()) {
        return MakeError(ErrorKind::kInvalidOrder, "expected a list of names");
      }
      auto idx = schema.IndexOf(item.get<std::string>());
      if (!idx) {
        return MakeError(
            ErrorKind::kUnknownAttribute,
            absl::StrCat("no attribute '", item.get<std::string>(), "'"));
      }
      out.push_back(*idx);
    }
    return out;
  };
  SchemaSequence seq;
  if (!json.is_object() || !json.contains("order")) {
    return MakeError(ErrorKind::kInvalidOrder, "sequence needs an 'order'");
  }
  KAMINO_ASSIGN_OR_RETURN(seq.order, indices(json["order"]));
  std::vector<size_t> sorted = seq.order;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != i || sorted.size() != schema.size()) {
      return MakeError(ErrorKind::kInvalidOrder,
                       "order is not a permutation of the schema");
    }
  }
  if (json.contains("groups")) {
    for (const auto& g : json["groups"]) {
      KAMINO_ASSIGN_OR_RETURN(std::vector<size_t> group, indices(g));
      seq.groups.push_back(std::move(group));
    }
  }
  if (json.contains("fallback")) {
    KAMINO_ASSIGN_OR_RETURN(seq.fallback, indices(json["fallback"]));
  }
  return seq;
}

SchemaSequence Sequence(const Schema& schema,
                        std::span<const DenialConstraint> dcs) {
  auto size_of = [&](size_t a) { return schema.attribute(a).DomainSize(); };
  auto by_domain = [&](size_t a, size_t b) {
    return size_of(a) != size_of(b) ? size_of(a) < size_of(b) : a < b;
  };

  std::vector<FunctionalDependency> fds = ExtractFds(dcs);
  auto min_lhs = [&](const FunctionalDependency& fd) {
    size_t best = SIZE_MAX;
    for (size_t a : fd.lhs) best = std::min(best, size_of(a));
    return best;
  };
  std::stable_sort(
      fds.begin(), fds.end(),
      [&](const FunctionalDependency& x, const FunctionalDependency& y) {
        return min_lhs(x) < min_lhs(y);
      });

  SchemaSequence seq;
  std::vector<bool> placed(schema.size(), false);
  auto place = [&](size_t a) {
    if (!placed[a]) {
      placed[a] = true;
      seq.order.push_back(a);
    }
  };
  for (FunctionalDependency& fd : fds) {
    std::sort(fd.lhs.begin(), fd.lhs.end(), by_domain);
    for (size_t a : fd.lhs) place(a);
    place(fd.rhs);
  }
  std::vector<size_t> rest;
  for (size_t a = 0; a < schema.size(); ++a) {
    if (!placed[a]) rest.push_back(a);
  }
  std::sort(rest.begin(), rest.end(), by_domain);
  for (size_t a : rest) place(a);
  return seq;
}

SchemaSequence ApplyDomainOptimizations(SchemaSequence seq,
                                        const Schema& schema,
                                        std::span<const DenialConstraint> dcs,
                                        const DomainThresholds& thresholds) {
  std::vector<bool> in_dc(schema.size(), false);
  for (const DenialConstraint& dc : dcs) {
    for (size_t a : dc.Attributes()) in_dc[a] = true;
  }
  const double limit = std::ldexp(1.0, thresholds.group_max_bits);
  auto groupable = [&](size_t a) {
    const AttributeSpec& spec = schema.attribute(a);
    return spec.is_categorical() && !in_dc[a] &&
           spec.DomainSize() < thresholds.fallback_min_size;
  };

  seq.groups.clear();
  seq.fallback.clear();
  for (size_t p = 0; p < seq.order.size();) {
    if (!groupable(seq.order[p])) {
      ++p;
      continue;
    }
    std::vector<size_t> run = {seq.order[p]};
    double product =
        static_cast<double>(schema.attribute(seq.order[p]).DomainSize());
    size_t q = p + 1;
    while (q < seq.order.size() && groupable(seq.order[q])) {
      const double next =
          product *
          static_cast<double>(schema.attribute(seq.order[q]).DomainSize());
      if (next > limit) break;
      product = next;
      run.push_back(seq.order[q]);
      ++q;
    }
    if (run.size() >= 2) seq.groups.push_back(std::move(run));
    p = q;
  }
  for (size_t a : seq.order) {
    if (schema.attribute(a).DomainSize() >= thresholds.fallback_min_size) {
      seq.fallback.push_back(a);
    }
  }
  return seq;
}

}  // namespace kamino
