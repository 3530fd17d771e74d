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

#ifndef KAMINO_SCHEMA_H_
#define KAMINO_SCHEMA_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "kamino/random.h"
#include "nlohmann/json_fwd.hpp"

namespace kamino {

enum class AttributeKind { kCategorical, kNumerical };

// One column of the relation. Categorical attributes carry their value list
// (the list order is the total order when `ordered` is set); numerical
// attributes carry a closed range and the equal-width bin count used for
// histograms and marginals.
struct AttributeSpec {
  std::string name;
  AttributeKind kind = AttributeKind::kCategorical;
  std::vector<std::string> categories;
  bool ordered = false;
  double lo = 0.0;
  double hi = 1.0;
  int bins = 1;

  static AttributeSpec Categorical(std::string name,
                                   std::vector<std::string> values,
                                   bool ordered = false);
  static AttributeSpec Numerical(std::string name, double lo, double hi,
                                 int bins);

  bool is_categorical() const { return kind == AttributeKind::kCategorical; }
  bool is_numerical() const { return kind == AttributeKind::kNumerical; }
  // Supports <, <=, >, >= in constraints.
  bool has_order() const { return is_numerical() || ordered; }

  // |D(A)|: number of categories, or the bin count for numerical attributes.
  size_t DomainSize() const;

  std::optional<size_t> CategoryIndex(std::string_view token) const;
};

class Schema {
 public:
  Schema() = default;
  // Validates names, domains and k >= 2.
  static absl::StatusOr<Schema> Create(std::vector<AttributeSpec> attributes);
  static absl::StatusOr<Schema> FromJson(const nlohmann::json& json);
  static absl::StatusOr<Schema> LoadJsonFile(const std::string& path);

  nlohmann::json ToJson() const;

  size_t size() const { return attributes_.size(); }
  const AttributeSpec& attribute(size_t i) const { return attributes_[i]; }
  const std::vector<AttributeSpec>& attributes() const { return attributes_; }
  std::optional<size_t> IndexOf(std::string_view name) const;

  bool operator==(const Schema& other) const;

 private:
  std::vector<AttributeSpec> attributes_;
  std::unordered_map<std::string, size_t> index_;
};

// Equal-width bin of `value`, 1-based; `value == hi` lands in bin q.
absl::StatusOr<int> Quantize(double value, const AttributeSpec& spec);

// Uniform draw inside the bin's sub-interval [lo + (b-1)w, lo + bw).
absl::StatusOr<double> Unquantize(int bin, const AttributeSpec& spec,
                                  RandomSource& rng);

// Unchecked 0-based variants for hot paths; callers guarantee a numerical
// spec and an in-range argument.
int BinOf(double value, const AttributeSpec& spec);
double DrawInBin(int zero_based_bin, const AttributeSpec& spec,
                 RandomSource& rng);

}  // namespace kamino

#endif  // KAMINO_SCHEMA_H_
