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

#include "kamino/status.h"

#include <array>
#include <string>
#include <utility>

namespace kamino {
namespace {

constexpr std::array<std::pair<ErrorKind, std::string_view>, 19> kKindNames = {{
    {ErrorKind::kMissingColumn, "MissingColumn"},
    {ErrorKind::kDomainViolation, "DomainViolation"},
    {ErrorKind::kParseError, "ParseError"},
    {ErrorKind::kNotNumerical, "NotNumerical"},
    {ErrorKind::kOutOfRange, "OutOfRange"},
    {ErrorKind::kSyntaxError, "SyntaxError"},
    {ErrorKind::kUnknownAttribute, "UnknownAttribute"},
    {ErrorKind::kTypeMismatch, "TypeMismatch"},
    {ErrorKind::kInsufficientAttributes, "InsufficientAttributes"},
    {ErrorKind::kInvalidOrder, "InvalidOrder"},
    {ErrorKind::kInvalidRate, "InvalidRate"},
    {ErrorKind::kEmptyCurve, "EmptyCurve"},
    {ErrorKind::kBudgetInfeasible, "BudgetInfeasible"},
    {ErrorKind::kEmptyContext, "EmptyContext"},
    {ErrorKind::kUnknownContextValue, "UnknownContextValue"},
    {ErrorKind::kUnsupportedArity, "UnsupportedArity"},
    {ErrorKind::kSchemaMismatch, "SchemaMismatch"},
    {ErrorKind::kInvalidSchema, "InvalidSchema"},
    {ErrorKind::kIoError, "IoError"},
}};

absl::StatusCode CodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kBudgetInfeasible:
      return absl::StatusCode::kFailedPrecondition;
    case ErrorKind::kOutOfRange:
      return absl::StatusCode::kOutOfRange;
    case ErrorKind::kIoError:
      return absl::StatusCode::kNotFound;
    default:
      return absl::StatusCode::kInvalidArgument;
  }
}

}  // namespace

std::string_view ErrorKindName(ErrorKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

absl::Status MakeError(ErrorKind kind, std::string_view detail) {
  return absl::Status(CodeFor(kind), std::string(ErrorKindName(kind)) + ": " +
                                         std::string(detail));
}

std::optional<ErrorKind> ErrorKindOf(const absl::Status& status) {
  if (status.ok()) return std::nullopt;
  const std::string_view msg(status.message().data(), status.message().size());
  const size_t colon = msg.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const std::string_view head = msg.substr(0, colon);
  for (const auto& [k, name] : kKindNames) {
    if (name == head) return k;
  }
  return std::nullopt;
}

}  // namespace kamino
