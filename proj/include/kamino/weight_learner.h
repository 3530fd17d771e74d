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

#ifndef KAMINO_WEIGHT_LEARNER_H_
#define KAMINO_WEIGHT_LEARNER_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "kamino/dataset.h"
#include "kamino/denial_constraint.h"
#include "kamino/random.h"
#include "kamino/sequencing.h"

namespace kamino {

// L2 sensitivity of the violation matrix over `dcs` for a sample of
// `sample_size` tuples: |unary| + |binary| * sqrt(L^2 - L).
absl::StatusOr<double> Sensitivity(std::span<const DenialConstraint> dcs,
                                   size_t sample_size);

// V[i][l]: violations of dcs[l] that involve tuple i of `sample` and only
// other tuples of `sample`.
std::vector<std::vector<double>> ExactViolationMatrix(
    const Dataset& sample, std::span<const DenialConstraint> dcs);

struct ViolationMatrix {
  std::vector<size_t> rows;  // sampled row ids (0-based, ascending)
  std::vector<std::vector<double>> values;  // rows x dcs, noised, >= 0
};

// Samples rows at rate L_w / n, drops random extras beyond L_w, counts exact
// violations within the sample, adds N(0, (S_w sigma_w)^2) per entry and
// floors at zero.
ViolationMatrix BuildNoisyMatrix(const Dataset& data,
                                 std::span<const DenialConstraint> dcs,
                                 size_t sample_size, double sigma_w,
                                 double sensitivity, RandomSource& rng);

struct WeightOptions {
  int iterations = 100;        // T_w per attribute
  double batch_size = 1;       // b_w
  double learning_rate = 0.1;  // eta_w
  double w_max = 10.0;
};

// Gradient ascent on O = exp(-sum_l W[l] V[i][l]), dO/dW[l] = -V[i][l] O,
// averaged over Bernoulli(b_w / L_w) row batches. Large counts make O
// underflow, so heavily violated constraints barely move from w_max. Walks the
// sequence; at each attribute only the constraints it completes are updated.
// Weights start at w_max and stay clamped to [0, w_max]. Reads only the matrix.
absl::StatusOr<std::vector<double>> LearnWeights(
    const ViolationMatrix& matrix, std::span<const DenialConstraint> dcs,
    const SchemaSequence& sequence, size_t num_attributes,
    const WeightOptions& options, RandomSource& rng);

// Indices of soft constraints without a given weight.
std::vector<size_t> LearnableConstraints(std::span<const DenialConstraint> dcs);

// Per-constraint weights: +inf for hard, the given weight where present,
// otherwise learned[position in LearnableConstraints].
std::vector<double> ResolveWeights(std::span<const DenialConstraint> dcs,
                                   std::span<const double> learned);

}  // namespace kamino

#endif  // KAMINO_WEIGHT_LEARNER_H_
