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

#ifndef KAMINO_PIPELINE_H_
#define KAMINO_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "kamino/accountant.h"
#include "kamino/dataset.h"
#include "kamino/denial_constraint.h"
#include "kamino/dp_model.h"
#include "kamino/sampler.h"
#include "kamino/sequencing.h"
#include "nlohmann/json_fwd.hpp"

namespace kamino {

struct RunOptions {
  double epsilon = 1.0;
  double delta = 1e-6;
  uint64_t seed = 0;
  bool parallel = false;       // independent sub-model initialization
  bool accept_reject = false;  // accept-reject sampling instead of the chain
  int mcmc_resamples = 0;      // m
  std::optional<size_t> output_rows;  // defaults to the input size
  DomainThresholds thresholds;
  // Fields the search does not touch (learning rate, model sizes, ...).
  PrivacyConfig base;
  // Knobs pinned by the caller.
  std::optional<double> sigma_g, sigma_d, sigma_w, batch_size;
  std::optional<int> iterations;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunResult {
  size_t input_rows = 0;
  SchemaSequence sequence;
  PrivacyConfig config;
  BudgetReport budget;
  ProbModel model;
  std::vector<double> weights;  // per constraint, +inf for hard
  bool learned_weights = false;
  size_t weight_sample_rows = 0;
  Dataset synthetic;
  FitStats fit_stats;
  SampleStats sample_stats;
  std::vector<StageTiming> timings;
};

// Sequencing, parameter search, model training, weight learning (only when
// some soft constraint has no weight) and sampling, in that order.
absl::StatusOr<RunResult> RunSynthesis(const Dataset& data,
                                       std::span<const DenialConstraint> dcs,
                                       const RunOptions& options);

// Writes synthetic.csv, model.json, budget.json, violations.json and
// manifest.json into `dir` (created if missing).
absl::Status WriteArtifacts(const RunResult& result,
                            std::span<const DenialConstraint> dcs,
                            const RunOptions& options, const std::string& dir,
                            const nlohmann::json& inputs);

// The manifest: seed, options, resolved configuration, weights, budget
// and stage timings.
nlohmann::json Manifest(const RunResult& result,
                        std::span<const DenialConstraint> dcs,
                        const RunOptions& options,
                        const nlohmann::json& inputs);

}  // namespace kamino

#endif  // KAMINO_PIPELINE_H_
