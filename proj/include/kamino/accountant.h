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

#ifndef KAMINO_ACCOUNTANT_H_
#define KAMINO_ACCOUNTANT_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json_fwd.hpp"

namespace kamino {

inline constexpr int kDefaultAlphaMax = 256;

// RDP cost of the Gaussian mechanism with noise multiplier `sigma`:
// alpha / (2 sigma^2).
absl::StatusOr<double> GaussianRdp(double sigma, int alpha);

// RDP cost of the sampled Gaussian mechanism at Poisson rate `rate`:
//   1/(alpha-1) * log sum_k C(alpha,k) (1-r)^(alpha-k) r^k exp(k(k-1)/(2s^2))
// evaluated in log space. rate = 1 reduces to GaussianRdp, rate = 0 costs 0.
absl::StatusOr<double> SgmRdp(double sigma, double rate, int alpha);

// R(alpha) on the integer orders 2..alpha_max.
class RdpCurve {
 public:
  RdpCurve() = default;
  explicit RdpCurve(std::vector<double> values) : values_(std::move(values)) {}
  static RdpCurve Zero(int alpha_max);
  static absl::StatusOr<RdpCurve> Gaussian(double sigma, int alpha_max);
  static absl::StatusOr<RdpCurve> Sgm(double sigma, double rate, int alpha_max);

  bool empty() const { return values_.empty(); }
  int alpha_max() const { return static_cast<int>(values_.size()) + 1; }
  double at(int alpha) const { return values_[alpha - 2]; }
  const std::vector<double>& values() const { return values_; }

  RdpCurve Scaled(double factor) const;
  RdpCurve operator+(const RdpCurve& other) const;

 private:
  std::vector<double> values_;
};

struct EpsDelta {
  double epsilon = 0.0;
  int alpha = 2;
};

// min over alpha of R(alpha) + log(1/delta)/(alpha-1).
absl::StatusOr<EpsDelta> ToEpsDelta(const RdpCurve& curve, double delta);

// All knobs of one synthesis run.
struct PrivacyConfig {
  double sigma_g = 1.0;    // histogram noise multiplier
  double sigma_d = 1.1;    // DPSGD noise multiplier
  double sigma_w = 1.0;    // violation-matrix noise multiplier
  double clip_norm = 2.0;  // C
  double batch_size = 32;  // expected Poisson batch b
  int iterations = 100;    // T per sub-model
  double learning_rate = 0.05;
  int weight_sample_size = 100;     // L_w
  double weight_batch_size = 1;     // b_w
  int weight_iterations = 100;      // T_w
  double weight_sensitivity = 0.0;  // S_w
  double weight_max = 10.0;
  double weight_learning_rate = 0.1;
  int embed_dim = 16;
  int n_candidates = 32;
  int mcmc_resamples = 0;      // m
  bool learn_weights = false;  // i_w
  int alpha_max = kDefaultAlphaMax;
  int search_phase = 0;  // 0: not searched, 1: standard ranges, 2: extended

  nlohmann::json ToJson() const;
  static absl::StatusOr<PrivacyConfig> FromJson(const nlohmann::json& json);
};

// How many private releases a trained model makes: noisy histograms (the
// first unit plus fallback units) and DPSGD-trained sub-models.
struct ModelShape {
  size_t num_histograms = 1;
  size_t num_submodels = 0;

  // One histogram and k-1 sub-models.
  static ModelShape ForAttributes(size_t k) { return {1, k - 1}; }
};

struct StageCost {
  std::string name;
  double multiplier = 0.0;  // number of composed mechanisms
  double sigma = 0.0;
  double rate = 1.0;
  RdpCurve curve;
};

struct BudgetReport {
  std::vector<StageCost> stages;  // histogram, training, weights
  RdpCurve total;
  double delta = 0.0;
  EpsDelta eps;
  bool learn_weights = false;

  nlohmann::json ToJson() const;
};

// Stage curves and their pointwise sum.
absl::StatusOr<BudgetReport> Account(const PrivacyConfig& config, size_t n,
                                     const ModelShape& shape, double delta);

absl::StatusOr<double> TotalRdp(const PrivacyConfig& config, size_t n,
                                const ModelShape& shape, int alpha);

struct SearchRequest {
  double epsilon = 1.0;
  double delta = 1e-6;
  size_t n = 0;
  ModelShape shape;
  size_t first_domain_size = 2;  // |D(S[1])|
  bool weights_unknown = false;
  // Knobs fixed by the caller; the search leaves them untouched.
  std::optional<double> sigma_g, sigma_d, sigma_w, batch_size;
  std::optional<int> iterations;
};

struct SearchBounds {
  double sigma_g_min, sigma_g_max;
  double sigma_d_min, sigma_d_max;
  double batch_min, batch_max;
  int iterations_min, iterations_max;
  double sigma_w_min, sigma_w_max;
};

// Ranges of the standard search for `request` (phase 1).
SearchBounds StandardBounds(const SearchRequest& request);

// Starts every free knob at its accuracy-greedy end and, while the budget is
// exceeded, steps all of them once per round in priority order: fewer
// iterations, more DPSGD noise, more histogram noise, smaller batches, more
// weight noise. If the standard ranges run out, continues into an extended
// range (down to n/128 iterations, DPSGD noise up to 8). Fails with
// BudgetInfeasible when nothing is left to move. Other fields of `base`
// (learning rate, model sizes, ...) are copied through.
absl::StatusOr<PrivacyConfig> SearchParameters(const SearchRequest& request,
                                               PrivacyConfig base);

}  // namespace kamino

#endif  // KAMINO_ACCOUNTANT_H_
