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

#include "kamino/violations.h"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <unordered_map>

#include "absl/strings/str_cat.h"
#include "kamino/status.h"

namespace kamino {
namespace {

// Row-major copy so that a row can be handed to DenialConstraint::HoldsOn as
// a plain pointer.
std::vector<double> RowMajor(const Dataset& data) {
  const size_t n = data.num_rows(), k = data.num_attributes();
  std::vector<double> flat(n * k);
  for (size_t a = 0; a < k; ++a) {
    std::span<const double> col = data.column(a);
    for (size_t r = 0; r < n; ++r) flat[r * k + a] = col[r];
  }
  return flat;
}

// Attributes compared for equality across the two tuples; rows that differ
// on any of them can never violate together.
std::vector<size_t> BlockingAttributes(const DenialConstraint& dc) {
  std::vector<size_t> attrs;
  for (const Predicate& p : dc.predicates) {
    if (p.IsCrossTuple() && p.op == CompareOp::kEq &&
        p.lhs_attr == p.rhs_attr) {
      attrs.push_back(p.lhs_attr);
    }
  }
  std::sort(attrs.begin(), attrs.end());
  attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
  return attrs;
}

template <typename Visit>
void ForEachViolation(const DenialConstraint& dc, const Dataset& data,
                      Visit visit) {
  const size_t n = data.num_rows(), k = data.num_attributes();
  const std::vector<double> flat = RowMajor(data);
  auto row = [&](size_t r) { return flat.data() + r * k; };
  if (dc.arity == 1) {
    for (size_t r = 0; r < n; ++r) {
      if (dc.HoldsOn(row(r), row(r))) visit(r, r);
    }
    return;
  }
  const std::vector<size_t> blocking = BlockingAttributes(dc);
  std::map<std::vector<double>, std::vector<size_t>> blocks;
  if (blocking.empty()) {
    auto& all = blocks[{}];
    for (size_t r = 0; r < n; ++r) all.push_back(r);
  } else {
    std::vector<double> key(blocking.size());
    for (size_t r = 0; r < n; ++r) {
      for (size_t b = 0; b < blocking.size(); ++b) key[b] = row(r)[blocking[b]];
      blocks[key].push_back(r);
    }
  }
  for (const auto& [key, members] : blocks) {
    for (size_t x = 0; x < members.size(); ++x) {
      for (size_t y = x + 1; y < members.size(); ++y) {
        if (dc.PairViolates(row(members[x]), row(members[y]))) {
          visit(members[x], members[y]);
        }
      }
    }
  }
}

}  // namespace

ViolationSet CountViolations(const DenialConstraint& dc, const Dataset& data) {
  ViolationSet set;
  set.dc_id = dc.id;
  set.arity = dc.arity;
  ForEachViolation(dc, data, [&](size_t i, size_t j) {
    if (dc.arity == 1) {
      set.tuples.push_back(i + 1);
    } else {
      set.pairs.emplace_back(i + 1, j + 1);
    }
  });
  std::sort(set.pairs.begin(), set.pairs.end());
  return set;
}

size_t CountViolationsSize(const DenialConstraint& dc, const Dataset& data) {
  size_t count = 0;
  ForEachViolation(dc, data, [&](size_t, size_t) { ++count; });
  return count;
}

size_t IncrementalViolations(const DenialConstraint& dc,
                             std::span<const double> new_tuple,
                             const Dataset& prefix) {
  const double* t = new_tuple.data();
  if (dc.arity == 1) return dc.HoldsOn(t, t) ? 1 : 0;
  const size_t k = prefix.num_attributes();
  std::vector<double> row(k);
  size_t count = 0;
  for (size_t r = 0; r < prefix.num_rows(); ++r) {
    for (size_t a = 0; a < k; ++a) row[a] = prefix.at(r, a);
    if (dc.PairViolates(t, row.data())) ++count;
  }
  return count;
}

absl::StatusOr<size_t> PartialViolations(const DenialConstraint& dc,
                                         std::span<const size_t> assigned,
                                         std::span<const double> new_tuple,
                                         const Dataset& prefix) {
  for (size_t attr : dc.Attributes()) {
    if (std::find(assigned.begin(), assigned.end(), attr) == assigned.end()) {
      return MakeError(
          ErrorKind::kInsufficientAttributes,
          absl::StrCat("constraint '", dc.id, "' reads unassigned attribute '",
                       prefix.schema().attribute(attr).name, "'"));
    }
  }
  // Only assigned cells are copied; the rest stay NaN and are never read.
  const size_t k = prefix.num_attributes();
  std::vector<double> t(k, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> row(k, std::numeric_limits<double>::quiet_NaN());
  for (size_t a : assigned) t[a] = new_tuple[a];
  if (dc.arity == 1) return dc.HoldsOn(t.data(), t.data()) ? 1 : 0;
  size_t count = 0;
  for (size_t r = 0; r < prefix.num_rows(); ++r) {
    for (size_t a : assigned) row[a] = prefix.at(r, a);
    if (dc.PairViolates(t.data(), row.data())) ++count;
  }
  return count;
}

absl::StatusOr<std::vector<std::vector<size_t>>> PartitionBySequence(
    std::span<const DenialConstraint> dcs, std::span<const size_t> order,
    size_t num_attributes) {
  std::vector<size_t> position(num_attributes, order.size());
  for (size_t p = 0; p < order.size(); ++p) position[order[p]] = p;
  std::vector<std::vector<size_t>> partition(num_attributes);
  for (size_t i = 0; i < dcs.size(); ++i) {
    size_t last = 0;
    bool first = true;
    for (size_t attr : dcs[i].Attributes()) {
      if (attr >= num_attributes || position[attr] == order.size()) {
        return MakeError(ErrorKind::kInvalidOrder,
                         absl::StrCat("constraint '", dcs[i].id,
                                      "' reads an attribute missing from the "
                                      "sequence"));
      }
      if (first || position[attr] > position[last]) last = attr;
      first = false;
    }
    partition[last].push_back(i);
  }
  return partition;
}

std::optional<FunctionalDependency> AsFd(const DenialConstraint& dc) {
  if (dc.arity != 2) return std::nullopt;
  FunctionalDependency fd;
  int inequalities = 0;
  for (const Predicate& p : dc.predicates) {
    if (!p.IsCrossTuple() || p.lhs_attr != p.rhs_attr) return std::nullopt;
    if (p.op == CompareOp::kEq) {
      fd.lhs.push_back(p.lhs_attr);
    } else if (p.op == CompareOp::kNe) {
      ++inequalities;
      fd.rhs = p.lhs_attr;
    } else {
      return std::nullopt;
    }
  }
  if (inequalities != 1 || fd.lhs.empty()) return std::nullopt;
  std::sort(fd.lhs.begin(), fd.lhs.end());
  fd.lhs.erase(std::unique(fd.lhs.begin(), fd.lhs.end()), fd.lhs.end());
  if (std::find(fd.lhs.begin(), fd.lhs.end(), fd.rhs) != fd.lhs.end()) {
    return std::nullopt;
  }
  return fd;
}

std::vector<FunctionalDependency> ExtractFds(
    std::span<const DenialConstraint> dcs) {
  std::vector<FunctionalDependency> fds;
  for (size_t i = 0; i < dcs.size(); ++i) {
    if (auto fd = AsFd(dcs[i])) {
      fd->dc_index = i;
      fds.push_back(*std::move(fd));
    }
  }
  return fds;
}

}  // namespace kamino
