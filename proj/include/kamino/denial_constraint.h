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

#ifndef KAMINO_DENIAL_CONSTRAINT_H_
#define KAMINO_DENIAL_CONSTRAINT_H_

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "kamino/schema.h"

namespace kamino {

enum class CompareOp { kEq, kNe, kLt, kLe, kGt, kGe };

std::string_view CompareOpSymbol(CompareOp op);

inline bool Compare(CompareOp op, double a, double b) {
  switch (op) {
    case CompareOp::kEq:
      return a == b;
    case CompareOp::kNe:
      return a != b;
    case CompareOp::kLt:
      return a < b;
    case CompareOp::kLe:
      return a <= b;
    case CompareOp::kGt:
      return a > b;
    case CompareOp::kGe:
      return a >= b;
  }
  return false;
}

// `t<lhs_slot+1>.lhs_attr OP rhs`, where rhs is another tuple cell or a
// constant. Categorical cells and constants are compared as category indices.
struct Predicate {
  int lhs_slot = 0;  // 0 for t1, 1 for t2
  size_t lhs_attr = 0;
  CompareOp op = CompareOp::kEq;
  bool rhs_constant = false;
  int rhs_slot = 0;
  size_t rhs_attr = 0;
  double constant = 0.0;

  // True when both sides read the same attribute of different tuples.
  bool IsCrossTuple() const { return !rhs_constant && lhs_slot != rhs_slot; }
};

struct DenialConstraint {
  std::string id;
  int arity = 1;
  std::vector<Predicate> predicates;
  bool hard = true;
  // +inf for hard constraints; NaN for soft constraints whose weight must be
  // learned.
  double weight = std::numeric_limits<double>::infinity();
  std::string text;

  bool has_weight() const { return weight == weight; }
  // Distinct attribute indices referenced, ascending.
  std::vector<size_t> Attributes() const;

  // All predicates hold with t1 <- a and t2 <- b. Rows are full-width
  // attribute vectors indexed by schema position.
  template <typename RowA, typename RowB>
  bool HoldsOn(const RowA& a, const RowB& b) const {
    for (const Predicate& p : predicates) {
      const double lhs = p.lhs_slot == 0 ? a[p.lhs_attr] : b[p.lhs_attr];
      const double rhs = p.rhs_constant    ? p.constant
                         : p.rhs_slot == 0 ? a[p.rhs_attr]
                                           : b[p.rhs_attr];
      if (!Compare(p.op, lhs, rhs)) return false;
    }
    return true;
  }
  // Arity-2: either orientation violates. Arity-1: `a` alone violates.
  template <typename RowA, typename RowB>
  bool PairViolates(const RowA& a, const RowB& b) const {
    return HoldsOn(a, b) || HoldsOn(b, a);
  }
};

// Grammar: [id ':'] [hard | soft ['(' weight ')']] '!' '(' pred {'&' pred} ')'
// with pred = tS.attr OP (tS.attr | constant), S in {1, 2}, OP one of
// == = != <> > >= < <= (unicode forms accepted). Omitting hard/soft means
// hard. Categorical constants may be quoted.
absl::StatusOr<DenialConstraint> ParseDc(std::string_view text,
                                         const Schema& schema,
                                         std::string id = "");

// One constraint per line; '#' starts a comment, blank lines are skipped.
// Constraints without an explicit id get "dc<line position>".
absl::StatusOr<std::vector<DenialConstraint>> ParseDcText(std::string_view text,
                                                          const Schema& schema);
absl::StatusOr<std::vector<DenialConstraint>> ParseDcFile(
    const std::string& path, const Schema& schema);

// Canonical text form that ParseDc accepts.
std::string FormatDc(const DenialConstraint& dc, const Schema& schema);

}  // namespace kamino

#endif  // KAMINO_DENIAL_CONSTRAINT_H_
