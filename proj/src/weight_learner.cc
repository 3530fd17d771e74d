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

#include "kamino/weight_learner.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "kamino/status.h"
#include "kamino/violations.h"

namespace kamino {

absl::StatusOr<double> Sensitivity(std::span<const DenialConstraint> dcs,
                                   size_t sample_size) {
  double unary = 0, binary = 0;
  for (const DenialConstraint& dc : dcs) {
    if (dc.arity == 1) {
      ++unary;
    } else if (dc.arity == 2) {
      ++binary;
    } else {
      return MakeError(
          ErrorKind::kUnsupportedArity,
          absl::StrCat("constraint '", dc.id, "' has arity ", dc.arity));
    }
  }
  const double l = static_cast<double>(sample_size);
  return unary + binary * std::sqrt(std::max(0.0, l * l - l));
}

std::vector<std::vector<double>> ExactViolationMatrix(
    const Dataset& sample, std::span<const DenialConstraint> dcs) {
  std::vector<std::vector<double>> v(sample.num_rows(),
                                     std::vector<double>(dcs.size(), 0.0));
  for (size_t l = 0; l < dcs.size(); ++l) {
    const ViolationSet set = CountViolations(dcs[l], sample);
    for (size_t t : set.tuples) v[t - 1][l] += 1;
    for (const auto& [i, j] : set.pairs) {
      v[i - 1][l] += 1;
      v[j - 1][l] += 1;
    }
  }
  return v;
}

ViolationMatrix BuildNoisyMatrix(const Dataset& data,
                                 std::span<const DenialConstraint> dcs,
                                 size_t sample_size, double sigma_w,
                                 double sensitivity, RandomSource& rng) {
  ViolationMatrix m;
  const size_t n = data.num_rows();
  const double rate =
      n == 0 ? 0.0 : std::min(1.0, sample_size / static_cast<double>(n));
  for (size_t r = 0; r < n; ++r) {
    if (rng.Bernoulli(rate)) m.rows.push_back(r);
  }
  if (m.rows.size() > sample_size) {
    std::shuffle(m.rows.begin(), m.rows.end(), rng.engine());
    m.rows.resize(sample_size);
    std::sort(m.rows.begin(), m.rows.end());
  }
  m.values = ExactViolationMatrix(data.Subset(m.rows), dcs);
  const double sd = sensitivity * sigma_w;
  for (auto& row : m.values) {
    for (double& x : row) {
      if (sd > 0) x += rng.Normal(0.0, sd);
      x = std::max(0.0, x);
    }
  }
  return m;
}

absl::StatusOr<std::vector<double>> LearnWeights(
    const ViolationMatrix& matrix, std::span<const DenialConstraint> dcs,
    const SchemaSequence& sequence, size_t num_attributes,
    const WeightOptions& options, RandomSource& rng) {
  KAMINO_ASSIGN_OR_RETURN(
      std::vector<std::vector<size_t>> partition,
      PartitionBySequence(dcs, sequence.order, num_attributes));
  std::vector<double> w(dcs.size(), options.w_max);
  const size_t rows = matrix.values.size();
  if (rows == 0) return w;
  const double rate = std::min(1.0, options.batch_size / rows);
  std::vector<double> step(dcs.size());
  for (size_t attr : sequence.order) {
    const std::vector<size_t>& phi = partition[attr];
    if (phi.empty()) continue;
    for (int t = 0; t < options.iterations; ++t) {
      std::fill(step.begin(), step.end(), 0.0);
      size_t batch = 0;
      for (size_t i = 0; i < rows; ++i) {
        if (!rng.Bernoulli(rate)) continue;
        ++batch;
        const std::vector<double>& v = matrix.values[i];
        double energy = 0.0;
        for (size_t l = 0; l < dcs.size(); ++l) energy += w[l] * v[l];
        const double o = std::exp(-energy);
        for (size_t l : phi) step[l] -= v[l] * o;
      }
      if (batch == 0) continue;
      for (size_t l : phi) {
        w[l] = std::clamp(w[l] + options.learning_rate * step[l] / batch, 0.0,
                          options.w_max);
      }
    }
  }
  return w;
}

std::vector<size_t> LearnableConstraints(
    std::span<const DenialConstraint> dcs) {
  std::vector<size_t> out;
  for (size_t l = 0; l < dcs.size(); ++l) {
    if (!dcs[l].hard && !dcs[l].has_weight()) out.push_back(l);
  }
  return out;
}

std::vector<double> ResolveWeights(std::span<const DenialConstraint> dcs,
                                   std::span<const double> learned) {
  std::vector<double> w(dcs.size());
  size_t next = 0;
  for (size_t l = 0; l < dcs.size(); ++l) {
    if (dcs[l].hard) {
      w[l] = std::numeric_limits<double>::infinity();
    } else if (dcs[l].has_weight()) {
      w[l] = dcs[l].weight;
    } else {
      w[l] = next < learned.size() ? learned[next] : 0.0;
      ++next;
    }
  }
  return w;
}

}  // namespace kamino
