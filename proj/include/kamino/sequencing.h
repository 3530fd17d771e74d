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

#ifndef KAMINO_SEQUENCING_H_
#define KAMINO_SEQUENCING_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "kamino/denial_constraint.h"
#include "kamino/schema.h"
#include "nlohmann/json_fwd.hpp"

namespace kamino {

// Attribute order along which tuples are factorized and columns synthesized.
// `groups` are runs of consecutive attributes of `order` that are modelled
// and sampled jointly; `fallback` attributes are drawn from their own noisy
// histogram without context.
struct SchemaSequence {
  std::vector<size_t> order;
  std::vector<std::vector<size_t>> groups;
  std::vector<size_t> fallback;

  // The order split into modelling units: each group is one unit, every
  // other attribute a singleton.
  std::vector<std::vector<size_t>> Units() const;
  bool IsFallback(size_t attr) const;

  nlohmann::json ToJson(const Schema& schema) const;
  static absl::StatusOr<SchemaSequence> FromJson(const nlohmann::json& json,
                                                 const Schema& schema);
};

struct DomainThresholds {
  int group_max_bits = 8;
  size_t fallback_min_size = 5000;
};

// Constraint-aware ordering: FDs first (sorted by the smallest LHS domain),
// each contributing its LHS by ascending domain size and then its RHS; the
// remaining attributes follow by ascending domain size. Ties keep schema
// order. Reads only the schema and the constraints.
[[nodiscard]] SchemaSequence Sequence(const Schema& schema,
                                      std::span<const DenialConstraint> dcs);

// Merges maximal runs (length >= 2) of consecutive constraint-free
// categorical attributes whose domain product stays within
// 2^group_max_bits, and flags attributes with domain size >=
// fallback_min_size.
[[nodiscard]] SchemaSequence ApplyDomainOptimizations(
    SchemaSequence seq, const Schema& schema,
    std::span<const DenialConstraint> dcs, const DomainThresholds& thresholds);

}  // namespace kamino

#endif  // KAMINO_SEQUENCING_H_
