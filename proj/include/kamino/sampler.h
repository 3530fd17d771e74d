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

#ifndef KAMINO_SAMPLER_H_
#define KAMINO_SAMPLER_H_

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "kamino/dataset.h"
#include "kamino/denial_constraint.h"
#include "kamino/dp_model.h"
#include "kamino/random.h"

namespace kamino {

struct SamplerOptions {
  size_t num_rows = 0;
  int mcmc_resamples = 0;  // m, per column
  int n_candidates = 32;   // draws for a numerical target
  bool accept_reject = false;
  int max_tries = 300;
  bool fd_fast_path = true;
};

// Candidate values for one cell, each a full assignment of the unit's
// members, with base probabilities p_{v|c}, per-constraint violation counts
// and the final law P[v] proportional to p_{v|c} exp(-sum w vio).
struct CellDistribution {
  std::vector<std::vector<double>> candidates;
  std::vector<double> base;
  std::vector<size_t> dcs;  // constraint indices, one per violation column
  std::vector<std::vector<size_t>> violations;  // candidates x dcs
  std::vector<double> probs;
  bool fallback = false;   // every candidate had probability zero
  bool fast_path = false;  // resolved by a hard functional dependency
};

// Normalizes base, applies the violation penalty and fills probs. When every
// candidate ends at zero, puts all mass on the candidate with the fewest
// violations, breaking ties by base probability.
void FinalizeDistribution(CellDistribution& dist,
                          std::span<const double> weights);

size_t DrawCandidate(const CellDistribution& dist, RandomSource& rng);

struct SampleStats {
  size_t fallback_cells = 0;
  size_t fast_path_cells = 0;
  size_t exhausted_cells = 0;  // accept-reject ran out of tries
};

// An n x k grid filled unit by unit along the model's sequence. Violations
// for a cell are counted against the admitted rows of the current unit,
// looked up through per-constraint hash buckets on the cross-tuple equality
// attributes.
class ChainSampler {
 public:
  // `weights` has one entry per constraint: +inf for hard.
  static absl::StatusOr<ChainSampler> Create(
      const ProbModel& model, std::span<const DenialConstraint> dcs,
      std::span<const double> weights, const SamplerOptions& options);

  size_t num_rows() const { return n_; }
  size_t num_units() const { return model_->units.size(); }
  const std::vector<size_t>& PhiOf(size_t unit) const { return phi_[unit]; }

  // Starts unit `unit` with no admitted rows.
  void BeginUnit(size_t unit);
  void Admit(size_t row);
  void Retract(size_t row);
  void Assign(size_t row, std::span<const double> values);
  void SetCell(size_t row, size_t attr, double value);

  CellDistribution Distribution(size_t row, RandomSource& rng) const;
  // Violations of each constraint of the current unit if `row` took
  // `values` for the unit's members.
  std::vector<size_t> Violations(size_t row,
                                 std::span<const double> values) const;
  // One accept-reject draw for `row`.
  std::vector<double> AcceptReject(size_t row, RandomSource& rng,
                                   SampleStats* stats) const;

  void FillUnit(size_t unit, RandomSource& rng, SampleStats* stats);
  absl::StatusOr<Dataset> ToDataset() const;

 private:
  struct Index {
    std::vector<size_t> key_attrs;
    std::unordered_map<std::string, std::vector<size_t>> buckets;
  };

  ChainSampler() = default;
  std::string KeyOf(const Index& index, const double* row) const;
  void BaseDistribution(size_t row, RandomSource& rng,
                        CellDistribution* dist) const;
  bool FastPath(size_t row, CellDistribution* dist) const;
  double Penalty(std::span<const size_t> vio) const;

  const ProbModel* model_ = nullptr;
  std::vector<DenialConstraint> dcs_;
  std::vector<double> weights_;
  SamplerOptions options_;
  size_t n_ = 0, k_ = 0;
  std::vector<double> grid_;              // row-major, NaN while empty
  std::vector<std::vector<size_t>> phi_;  // per unit
  std::vector<std::vector<size_t>> fds_;  // per unit: hard FD constraints
  size_t unit_ = 0;
  std::vector<Index> indexes_;  // parallel to phi_[unit_]
};

// Fills an n-row instance column by column. With accept_reject set, each
// cell draws from the model and keeps a draw with probability
// exp(-sum w vio); otherwise cells draw from their CellDistribution and each
// column is followed by m re-samples of random cells of that column.
absl::StatusOr<Dataset> Synthesize(const ProbModel& model,
                                   std::span<const DenialConstraint> dcs,
                                   std::span<const double> weights,
                                   const SamplerOptions& options,
                                   RandomSource& rng,
                                   SampleStats* stats = nullptr);

}  // namespace kamino

#endif  // KAMINO_SAMPLER_H_
