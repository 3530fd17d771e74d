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

#ifndef KAMINO_DP_MODEL_H_
#define KAMINO_DP_MODEL_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "kamino/accountant.h"
#include "kamino/dataset.h"
#include "kamino/random.h"
#include "kamino/schema.h"
#include "kamino/sequencing.h"
#include "kamino/submodel.h"
#include "kamino/units.h"
#include "nlohmann/json_fwd.hpp"

namespace kamino {

// Noisy counts of a unit's values (bins for a numerical attribute) and the
// normalized distribution derived from them.
struct NoisyHistogram {
  Unit unit;
  std::vector<double> counts;
  std::vector<double> probs;
};

// Counts plus N(0, 2 sigma_g^2) per cell, negatives floored at zero, then
// normalized (uniform if nothing survives).
NoisyHistogram FitHistogram(const Dataset& data, const Unit& unit,
                            double sigma_g, RandomSource& rng);

struct DpsgdOptions {
  double noise_multiplier = 1.1;  // sigma_d; 0 disables noise
  double clip_norm = 1.0;         // C; +inf disables clipping
  double batch_size = 32;         // expected Poisson batch b
  int iterations = 100;           // T
  double learning_rate = 0.5;
};

// What one DPSGD step saw; handed to the optional observer.
struct StepInfo {
  int step = 0;
  std::span<const size_t> batch;          // sampled row indices
  std::span<const double> raw_norms;      // per-example gradient norms
  std::span<const double> clipped_norms;  // after clipping
  bool noised = false;
  std::span<const double> params;  // after the update
};
using StepObserver = std::function<void(const StepInfo&)>;

struct TrainStats {
  size_t row_accesses = 0;
  size_t noise_draws = 0;
  int steps = 0;
};

// Poisson-sampled DPSGD: each step draws rows independently at rate b/n,
// clips every per-example gradient to norm C, adds N(0, sigma_d^2 C^2 I) to
// their sum, divides by b and takes a plain gradient step.
// Scales `grad` to L2 norm at most `clip_norm`; returns the raw norm.
double ClipGradient(std::span<double> grad, double clip_norm);

TrainStats TrainSubmodel(SubModel& model, const Dataset& data,
                         const DpsgdOptions& options, RandomSource& rng,
                         const StepObserver& observer = nullptr);

// Mean loss gradient over all rows (no clipping, no noise).
std::vector<double> FullBatchGradient(const SubModel& model,
                                      const Dataset& data);

// The chain model: a noisy histogram for the first unit and every fallback
// unit, a sub-model for every other unit with all earlier non-fallback
// attributes as context.
struct ProbModel {
  Schema schema;
  SchemaSequence sequence;
  std::vector<Unit> units;
  std::vector<std::optional<NoisyHistogram>> histograms;  // per unit
  std::vector<std::optional<SubModel>> submodels;         // per unit
  int embed_dim = 16;

  ModelShape Shape() const;
  nlohmann::json ToJson() const;
  static absl::StatusOr<ProbModel> FromJson(const nlohmann::json& json);
};

// Which units get a histogram and which a sub-model, without any data.
ModelShape PlanShape(const Schema& schema, const SchemaSequence& sequence);

struct FitStats {
  size_t row_accesses = 0;
  size_t noise_draws = 0;  // DPSGD noise vectors
  std::vector<TrainStats> per_unit;
};

// Sequential mode trains units in order and initializes context embeddings
// (and the query) from the models trained so far. Parallel mode trains every
// sub-model on its own thread from independent random initialization.
absl::StatusOr<ProbModel> FitModel(const Dataset& data,
                                   const SchemaSequence& sequence,
                                   const PrivacyConfig& config,
                                   RandomSource& rng, bool parallel,
                                   FitStats* stats = nullptr);

}  // namespace kamino

#endif  // KAMINO_DP_MODEL_H_
