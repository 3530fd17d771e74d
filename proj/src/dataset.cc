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

#include "kamino/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "kamino/status.h"

namespace kamino {

Dataset::Dataset(Schema schema)
    : schema_(std::move(schema)), columns_(schema_.size()) {}

absl::Status ValidateCell(const AttributeSpec& spec, double value) {
  if (spec.is_categorical()) {
    if (!(value >= 0 && value < static_cast<double>(spec.categories.size()) &&
          value == std::floor(value))) {
      return MakeError(
          ErrorKind::kDomainViolation,
          absl::StrCat("'", spec.name, "' has no category index ", value));
    }
  } else if (!(std::isfinite(value) && value >= spec.lo && value <= spec.hi)) {
    return MakeError(ErrorKind::kDomainViolation,
                     absl::StrCat("'", spec.name, "' value ", value,
                                  " outside [", spec.lo, ", ", spec.hi, "]"));
  }
  return absl::OkStatus();
}

absl::StatusOr<Dataset> Dataset::FromColumns(
    Schema schema, std::vector<std::vector<double>> columns) {
  if (columns.size() != schema.size()) {
    return MakeError(ErrorKind::kSchemaMismatch,
                     absl::StrCat("expected ", schema.size(), " columns, got ",
                                  columns.size()));
  }
  for (size_t a = 0; a < columns.size(); ++a) {
    if (columns[a].size() != columns[0].size()) {
      return MakeError(ErrorKind::kSchemaMismatch, "ragged columns");
    }
    for (double v : columns[a]) {
      KAMINO_RETURN_IF_ERROR(ValidateCell(schema.attribute(a), v));
    }
  }
  Dataset data(std::move(schema));
  data.columns_ = std::move(columns);
  return data;
}

std::vector<double> Dataset::Row(size_t row) const {
  std::vector<double> tuple(columns_.size());
  for (size_t a = 0; a < columns_.size(); ++a) tuple[a] = columns_[a][row];
  return tuple;
}

std::string Dataset::Token(size_t row, size_t attr) const {
  const AttributeSpec& spec = schema_.attribute(attr);
  if (spec.is_categorical()) return spec.categories[category(row, attr)];
  return FormatNumber(at(row, attr));
}

absl::Status Dataset::AppendRow(std::span<const double> tuple) {
  if (tuple.size() != columns_.size()) {
    return MakeError(ErrorKind::kSchemaMismatch, "tuple arity mismatch");
  }
  for (size_t a = 0; a < tuple.size(); ++a) {
    KAMINO_RETURN_IF_ERROR(ValidateCell(schema_.attribute(a), tuple[a]));
  }
  for (size_t a = 0; a < tuple.size(); ++a) columns_[a].push_back(tuple[a]);
  return absl::OkStatus();
}

Dataset Dataset::Prefix(size_t count) const {
  Dataset out(schema_);
  for (size_t a = 0; a < columns_.size(); ++a) {
    out.columns_[a].assign(columns_[a].begin(),
                           columns_[a].begin() + std::min(count, num_rows()));
  }
  return out;
}

Dataset Dataset::Subset(std::span<const size_t> rows) const {
  Dataset out(schema_);
  for (size_t a = 0; a < columns_.size(); ++a) {
    out.columns_[a].reserve(rows.size());
    for (size_t r : rows) out.columns_[a].push_back(columns_[a][r]);
  }
  return out;
}

std::string FormatNumber(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", value);
  return buf;
}

absl::StatusOr<Dataset> ParseDatasetCsv(std::istream& in,
                                        const Schema& schema) {
  std::string line;
  if (!std::getline(in, line)) {
    return MakeError(ErrorKind::kParseError, "missing header row");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = absl::StrSplit(line, ',');
  for (std::string& h : header) h = std::string(absl::StripAsciiWhitespace(h));

  // column_of[attr] = CSV column holding that attribute.
  std::vector<size_t> column_of(schema.size());
  for (size_t a = 0; a < schema.size(); ++a) {
    const std::string& name = schema.attribute(a).name;
    size_t found = header.size();
    for (size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) found = c;
    }
    if (found == header.size()) {
      return MakeError(ErrorKind::kMissingColumn,
                       absl::StrCat("no column '", name, "'"));
    }
    column_of[a] = found;
  }

  std::vector<std::vector<double>> columns(schema.size());
  size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    ++row;
    std::vector<std::string> cells = absl::StrSplit(line, ',');
    if (cells.size() != header.size()) {
      return MakeError(ErrorKind::kParseError,
                       absl::StrCat("row ", row, ": expected ", header.size(),
                                    " cells, got ", cells.size()));
    }
    for (size_t a = 0; a < schema.size(); ++a) {
      const AttributeSpec& spec = schema.attribute(a);
      const std::string cell(absl::StripAsciiWhitespace(cells[column_of[a]]));
      if (spec.is_categorical()) {
        auto idx = spec.CategoryIndex(cell);
        if (!idx) {
          return MakeError(ErrorKind::kDomainViolation,
                           absl::StrCat("row ", row, ", attribute '", spec.name,
                                        "', value '", cell, "'"));
        }
        columns[a].push_back(static_cast<double>(*idx));
      } else {
        double v;
        if (!absl::SimpleAtod(cell, &v) || !std::isfinite(v)) {
          return MakeError(ErrorKind::kParseError,
                           absl::StrCat("row ", row, ", attribute '", spec.name,
                                        "', value '", cell, "'"));
        }
        if (v < spec.lo || v > spec.hi) {
          return MakeError(ErrorKind::kDomainViolation,
                           absl::StrCat("row ", row, ", attribute '", spec.name,
                                        "', value '", cell, "'"));
        }
        columns[a].push_back(v);
      }
    }
  }
  return Dataset::FromColumns(schema, std::move(columns));
}

absl::StatusOr<Dataset> LoadDataset(const std::string& csv_path,
                                    const Schema& schema) {
  std::ifstream in(csv_path);
  if (!in) {
    return MakeError(ErrorKind::kIoError,
                     absl::StrCat("cannot open ", csv_path));
  }
  return ParseDatasetCsv(in, schema);
}

void WriteCsv(const Dataset& data, std::ostream& out) {
  const Schema& schema = data.schema();
  for (size_t a = 0; a < schema.size(); ++a) {
    out << (a ? "," : "") << schema.attribute(a).name;
  }
  out << "\n";
  for (size_t r = 0; r < data.num_rows(); ++r) {
    for (size_t a = 0; a < schema.size(); ++a) {
      out << (a ? "," : "") << data.Token(r, a);
    }
    out << "\n";
  }
}

absl::Status WriteCsvFile(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    return MakeError(ErrorKind::kIoError, absl::StrCat("cannot write ", path));
  }
  WriteCsv(data, out);
  return out ? absl::OkStatus()
             : MakeError(ErrorKind::kIoError,
                         absl::StrCat("write failed: ", path));
}

}  // namespace kamino
