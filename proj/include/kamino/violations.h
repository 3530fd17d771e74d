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

#ifndef KAMINO_VIOLATIONS_H_
#define KAMINO_VIOLATIONS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "kamino/dataset.h"
#include "kamino/denial_constraint.h"

namespace kamino {

// Violating tuples (arity 1) or unordered tuple pairs (arity 2) of one
// constraint. Tuple ids are 1-based; pairs are stored as (i, j) with i < j,
// sorted lexicographically.
struct ViolationSet {
  std::string dc_id;
  int arity = 1;
  std::vector<size_t> tuples;
  std::vector<std::pair<size_t, size_t>> pairs;

  size_t size() const { return arity == 1 ? tuples.size() : pairs.size(); }
};

ViolationSet CountViolations(const DenialConstraint& dc, const Dataset& data);

// |V(dc, D)| without materializing members.
size_t CountViolationsSize(const DenialConstraint& dc, const Dataset& data);

// Violations in which `new_tuple` is the highest-id member, given the tuples
// that precede it. `new_tuple` is a full-width row in schema order.
size_t IncrementalViolations(const DenialConstraint& dc,
                             std::span<const double> new_tuple,
                             const Dataset& prefix);

// As IncrementalViolations, evaluated on the projection to `assigned`
// attributes. Fails with InsufficientAttributes when the constraint reads an
// attribute outside `assigned`. Cells outside `assigned` are never read.
absl::StatusOr<size_t> PartialViolations(const DenialConstraint& dc,
                                         std::span<const size_t> assigned,
                                         std::span<const double> new_tuple,
                                         const Dataset& prefix);

// partition[a] lists the indices of the constraints whose attributes are
// first all covered when attribute `a` is placed by `order` (a permutation of
// attribute indices). Fails with InvalidOrder if some constraint reads an
// attribute that `order` never places.
absl::StatusOr<std::vector<std::vector<size_t>>> PartitionBySequence(
    std::span<const DenialConstraint> dcs, std::span<const size_t> order,
    size_t num_attributes);

// X -> Y read off an arity-2 constraint of the form
// !(t1.X1 == t2.X1 & ... & t1.Y != t2.Y).
struct FunctionalDependency {
  std::vector<size_t> lhs;
  size_t rhs = 0;
  size_t dc_index = 0;
};

std::vector<FunctionalDependency> ExtractFds(
    std::span<const DenialConstraint> dcs);

// FD reading of a single constraint, if it has that shape.
std::optional<FunctionalDependency> AsFd(const DenialConstraint& dc);

}  // namespace kamino

#endif  // KAMINO_VIOLATIONS_H_
