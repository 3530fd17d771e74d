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

#ifndef KAMINO_SUBMODEL_H_
#define KAMINO_SUBMODEL_H_

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "kamino/random.h"
#include "kamino/schema.h"
#include "kamino/units.h"
#include "nlohmann/json_fwd.hpp"

namespace kamino {

// Output of a sub-model for one context: a probability vector over the
// target unit's values, or a Gaussian over a numerical target (in the
// attribute's own units).
struct Prediction {
  std::vector<double> probs;
  double mean = 0.0;
  double stddev = 1.0;
};

// Trained parameter blocks keyed by attribute (embedding table or numerical
// transform), plus the attention query, used to initialize later models.
struct EmbeddingStore {
  std::map<size_t, std::vector<double>> blocks;
  std::vector<double> query;
};

// Discriminative model M_{X,y}. Every context attribute maps its value to a
// dim-d embedding: categorical values through a lookup table, numerical
// values through z = B relu(A x + c) + d on the range-standardized value.
// A single learned query scores each embedding (q.z / sqrt(d)); the softmax
// of the scores weights the embeddings into one context vector h. A
// categorical target gets logits T[v].h + beta[v]; a numerical target gets
// a mean and log standard deviation, both linear in h, trained with the
// Gaussian negative log-likelihood of the standardized value.
//
// All parameters live in one flat vector so that per-example gradients can
// be clipped and noised as a whole.
class SubModel {
 public:
  SubModel() = default;

  // Fails with EmptyContext if `context` is empty.
  static absl::StatusOr<SubModel> Create(const Schema& schema,
                                         std::vector<size_t> context,
                                         Unit target, int embed_dim,
                                         RandomSource& rng);

  const std::vector<size_t>& context() const { return context_; }
  const Unit& target() const { return target_; }
  int embed_dim() const { return dim_; }
  bool numerical_target() const { return numerical_target_; }
  size_t target_domain_size() const { return target_size_; }

  size_t num_params() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  // Loss of one full-width row; when `grad` is non-empty (size
  // num_params()), adds the row's gradient into it.
  double Loss(const double* row, std::span<double> grad) const;

  // Unchecked prediction for a row whose context cells are in domain.
  void PredictInto(const double* row, Prediction* out) const;
  // Checks context cells first (UnknownContextValue).
  absl::StatusOr<Prediction> Predict(std::span<const double> row) const;

  // Copies blocks for context attributes (and the query) from `store`.
  void WarmStart(const EmbeddingStore& store);
  // Publishes this model's trained blocks; a categorical single-attribute
  // target publishes its output table as that attribute's embedding.
  void Export(EmbeddingStore* store) const;

  // Parameter block of one context attribute (offset, length).
  std::pair<size_t, size_t> ContextBlock(size_t position) const;
  size_t query_offset() const { return query_offset_; }
  size_t head_offset() const { return head_offset_; }

  nlohmann::json ToJson(const Schema& schema) const;
  static absl::StatusOr<SubModel> FromJson(const nlohmann::json& json,
                                           const Schema& schema);

 private:
  struct ContextSlot {
    size_t attr;
    bool numerical;
    size_t offset;
    size_t domain;  // categorical domain size
    double center;  // numerical standardization
    double scale;
  };

  void Layout(const Schema& schema);
  // Forward pass; fills embeddings, numerical pre-activations and weights.
  struct Forward;
  void RunForward(const double* row, Forward* f) const;

  std::vector<size_t> context_;
  Unit target_;
  int dim_ = 0;
  bool numerical_target_ = false;
  size_t target_size_ = 0;
  std::vector<size_t> target_radix_;
  double target_center_ = 0.0;
  double target_scale_ = 1.0;
  std::vector<ContextSlot> slots_;
  size_t query_offset_ = 0;
  size_t head_offset_ = 0;
  std::vector<double> params_;
};

}  // namespace kamino

#endif  // KAMINO_SUBMODEL_H_
