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

#ifndef KAMINO_EVALUATOR_H_
#define KAMINO_EVALUATOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "kamino/dataset.h"
#include "kamino/denial_constraint.h"
#include "nlohmann/json_fwd.hpp"

namespace kamino {

// 100 |V| / C(n, 2) for pair constraints, 100 |V| / n for single-tuple ones.
double ViolationPercentage(const DenialConstraint& dc, const Dataset& data);

enum class MarginalMetric { kMax, kHalfL1 };

// Normalized counts over the product domain of `attrs` (numerical
// attributes by bin), mixed-radix with the first attribute most significant.
std::vector<double> Marginal(const Dataset& data,
                             std::span<const size_t> attrs);

double MarginalDistance(const Dataset& truth, const Dataset& synthetic,
                        std::span<const size_t> attrs, MarginalMetric metric);

struct ViolationEntry {
  std::string dc_id;
  double truth = 0.0;
  double synthetic = 0.0;
  double gap = 0.0;
};

struct MarginalEntry {
  int alpha = 1;
  std::vector<std::string> attributes;
  double distance = 0.0;
};

struct EvaluationReport {
  std::vector<ViolationEntry> violations;
  std::vector<MarginalEntry> marginals;
  MarginalMetric metric = MarginalMetric::kMax;

  // Median and mean distance over the sets of size `alpha`.
  double MedianDistance(int alpha) const;
  double MeanDistance(int alpha) const;

  nlohmann::json ToJson() const;
  std::string ToText() const;
};

// Violation gaps for every constraint and marginal distances for every
// attribute set of each size in `alphas` (1 or 2).
absl::StatusOr<EvaluationReport> Evaluate(
    const Dataset& truth, const Dataset& synthetic,
    std::span<const DenialConstraint> dcs, std::span<const int> alphas,
    MarginalMetric metric = MarginalMetric::kMax);

// Per-constraint violation statistics of one instance.
nlohmann::json ViolationSummary(std::span<const DenialConstraint> dcs,
                                const Dataset& data);

}  // namespace kamino

#endif  // KAMINO_EVALUATOR_H_
