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

#ifndef KAMINO_DATASET_H_
#define KAMINO_DATASET_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "kamino/schema.h"

namespace kamino {

// An n x k relation instance stored column-major. Categorical cells hold the
// category index (as an exact small integer), numerical cells the value.
// Tuple identifiers exposed to users are 1-based row positions; the accessors
// below take 0-based rows.
class Dataset {
 public:
  Dataset() = default;
  // Empty instance over `schema`.
  explicit Dataset(Schema schema);

  // Validates every cell against its attribute's domain.
  static absl::StatusOr<Dataset> FromColumns(
      Schema schema, std::vector<std::vector<double>> columns);

  const Schema& schema() const { return schema_; }
  size_t num_rows() const { return columns_.empty() ? 0 : columns_[0].size(); }
  size_t num_attributes() const { return columns_.size(); }

  double at(size_t row, size_t attr) const { return columns_[attr][row]; }
  size_t category(size_t row, size_t attr) const {
    return static_cast<size_t>(columns_[attr][row]);
  }
  std::span<const double> column(size_t attr) const { return columns_[attr]; }
  std::vector<double> Row(size_t row) const;
  std::string Token(size_t row, size_t attr) const;

  absl::Status AppendRow(std::span<const double> tuple);
  // First `count` rows (the prefix D_{:count+1}).
  Dataset Prefix(size_t count) const;
  Dataset Subset(std::span<const size_t> rows) const;

 private:
  Schema schema_;
  std::vector<std::vector<double>> columns_;
};

// Checks a single cell value against its attribute.
absl::Status ValidateCell(const AttributeSpec& spec, double value);

// Reads a headed CSV; columns may appear in any order but every schema
// attribute must be present. Row order is preserved.
absl::StatusOr<Dataset> LoadDataset(const std::string& csv_path,
                                    const Schema& schema);
absl::StatusOr<Dataset> ParseDatasetCsv(std::istream& in, const Schema& schema);

// Header in schema order; numerics at 15 significant digits.
void WriteCsv(const Dataset& data, std::ostream& out);
absl::Status WriteCsvFile(const Dataset& data, const std::string& path);

std::string FormatNumber(double value);

}  // namespace kamino

#endif  // KAMINO_DATASET_H_
