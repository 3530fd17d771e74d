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

#ifndef KAMINO_STATUS_H_
#define KAMINO_STATUS_H_

#include <optional>
#include <string_view>

#include "absl/status/status.h"

namespace kamino {

// Named failure categories. The kind is carried as the leading token of the
// status message ("DomainViolation: ...") so it survives propagation through
// plain absl::Status plumbing.
enum class ErrorKind {
  kMissingColumn,
  kDomainViolation,
  kParseError,
  kNotNumerical,
  kOutOfRange,
  kSyntaxError,
  kUnknownAttribute,
  kTypeMismatch,
  kInsufficientAttributes,
  kInvalidOrder,
  kInvalidRate,
  kEmptyCurve,
  kBudgetInfeasible,
  kEmptyContext,
  kUnknownContextValue,
  kUnsupportedArity,
  kSchemaMismatch,
  kInvalidSchema,
  kIoError,
};

std::string_view ErrorKindName(ErrorKind kind);

absl::Status MakeError(ErrorKind kind, std::string_view detail);

// Returns the kind encoded by MakeError, or nullopt for foreign statuses.
std::optional<ErrorKind> ErrorKindOf(const absl::Status& status);

inline bool HasErrorKind(const absl::Status& status, ErrorKind kind) {
  return ErrorKindOf(status) == kind;
}

}  // namespace kamino

#define KAMINO_RETURN_IF_ERROR(expr)                      \
  do {                                                    \
    if (absl::Status _st = (expr); !_st.ok()) return _st; \
  } while (0)

#define KAMINO_CONCAT_INNER(a, b) a##b
#define KAMINO_CONCAT(a, b) KAMINO_CONCAT_INNER(a, b)
#define KAMINO_ASSIGN_OR_RETURN_IMPL(tmp, lhs, expr) \
  auto tmp = (expr);                                 \
  if (!tmp.ok()) return tmp.status();                \
  lhs = std::move(tmp).value()
#define KAMINO_ASSIGN_OR_RETURN(lhs, expr) \
  KAMINO_ASSIGN_OR_RETURN_IMPL(KAMINO_CONCAT(_statusor_, __LINE__), lhs, expr)

#endif  // KAMINO_STATUS_H_
