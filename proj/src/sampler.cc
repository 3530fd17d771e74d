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

#include "kamino/sampler.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "absl/strings/str_cat.h"
#include "kamino/status.h"
#include "kamino/units.h"
#include "kamino/violations.h"

namespace kamino {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Attributes compared for equality across the two tuples; rows can only
// violate together when they agree on all of them.
std::vector<size_t> EqualityAttributes(const DenialConstraint& dc) {
  std::vector<size_t> attrs;
  if (dc.arity != 2) return attrs;
  for (const Predicate& p : dc.predicates) {
    if (p.IsCrossTuple() && p.op == CompareOp::kEq &&
        p.lhs_attr == p.rhs_attr) {
      attrs.push_back(p.lhs_attr);
    }
  }
  std::sort(attrs.begin(), attrs.end());
  attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
  return attrs;
}

}  // namespace

void FinalizeDistribution(CellDistribution& dist,
                          std::span<const double> weights) {
  const size_t m = dist.candidates.size();
  double total = 0.0;
  for (double b : dist.base) total += b;
  if (total > 0) {
    for (double& b : dist.base) b /= total;
  }
  std::vector<double> penalty(m, 0.0);
  double best = kInf;
  for (size_t c = 0; c < m; ++c) {
    for (size_t p = 0; p < dist.dcs.size(); ++p) {
      const size_t v = dist.violations[c][p];
      if (v > 0) penalty[c] += weights[dist.dcs[p]] * static_cast<double>(v);
    }
    if (dist.base[c] > 0) best = std::min(best, penalty[c]);
  }
  dist.probs.assign(m, 0.0);
  dist.fallback = false;
  if (best == kInf) {
    size_t pick = 0, pick_vio = std::numeric_limits<size_t>::max();
    for (size_t c = 0; c < m; ++c) {
      size_t vio = 0;
      for (size_t v : dist.violations[c]) vio += v;
      if (vio < pick_vio ||
          (vio == pick_vio && dist.base[c] > dist.base[pick])) {
        pick = c;
        pick_vio = vio;
      }
    }
    if (m > 0) dist.probs[pick] = 1.0;
    dist.fallback = true;
    return;
  }
  double sum = 0.0;
  for (size_t c = 0; c < m; ++c) {
    if (dist.base[c] > 0 && penalty[c] < kInf) {
      dist.probs[c] = dist.base[c] * std::exp(best - penalty[c]);
      sum += dist.probs[c];
    }
  }
  for (double& p : dist.probs) p /= sum;
}

size_t DrawCandidate(const CellDistribution& dist, RandomSource& rng) {
  return rng.Categorical(dist.probs);
}

absl::StatusOr<ChainSampler> ChainSampler::Create(
    const ProbModel& model, std::span<const DenialConstraint> dcs,
    std::span<const double> weights, const SamplerOptions& options) {
  if (weights.size() != dcs.size()) {
    return MakeError(ErrorKind::kOutOfRange,
                     absl::StrCat("expected ", dcs.size(), " weights, got ",
                                  weights.size()));
  }
  for (size_t l = 0; l < dcs.size(); ++l) {
    if (std::isnan(weights[l]) || weights[l] < 0) {
      return MakeError(
          ErrorKind::kOutOfRange,
          absl::StrCat("constraint '", dcs[l].id, "' has no usable weight"));
    }
  }
  ChainSampler s;
  s.model_ = &model;
  s.dcs_.assign(dcs.begin(), dcs.end());
  s.weights_.assign(weights.begin(), weights.end());
  s.options_ = options;
  s.n_ = options.num_rows;
  s.k_ = model.schema.size();
  s.grid_.assign(s.n_ * s.k_, std::numeric_limits<double>::quiet_NaN());
  KAMINO_ASSIGN_OR_RETURN(std::vector<std::vector<size_t>> by_attr,
                          PartitionBySequence(dcs, model.sequence.order, s.k_));
  const size_t units = model.units.size();
  s.phi_.resize(units);
  s.fds_.resize(units);
  for (size_t u = 0; u < units; ++u) {
    if (!model.histograms[u] && !model.submodels[u]) {
      return MakeError(ErrorKind::kSchemaMismatch,
                       absl::StrCat("unit ", u, " has no model"));
    }
    for (size_t a : model.units[u]) {
      s.phi_[u].insert(s.phi_[u].end(), by_attr[a].begin(), by_attr[a].end());
    }
    std::sort(s.phi_[u].begin(), s.phi_[u].end());
    if (model.units[u].size() != 1) continue;
    for (size_t l : s.phi_[u]) {
      if (!dcs[l].hard) continue;
      const std::optional<FunctionalDependency> fd = AsFd(dcs[l]);
      if (fd && fd->rhs == model.units[u][0]) s.fds_[u].push_back(l);
    }
  }
  return s;
}

std::string ChainSampler::KeyOf(const Index& index, const double* row) const {
  std::string key(index.key_attrs.size() * sizeof(double), '\0');
  for (size_t i = 0; i < index.key_attrs.size(); ++i) {
    std::memcpy(key.data() + i * sizeof(double), row + index.key_attrs[i],
                sizeof(double));
  }
  return key;
}

void ChainSampler::BeginUnit(size_t unit) {
  unit_ = unit;
  indexes_.assign(phi_[unit].size(), Index{});
  for (size_t p = 0; p < phi_[unit].size(); ++p) {
    indexes_[p].key_attrs = EqualityAttributes(dcs_[phi_[unit][p]]);
  }
}

void ChainSampler::Admit(size_t row) {
  for (size_t p = 0; p < indexes_.size(); ++p) {
    if (dcs_[phi_[unit_][p]].arity != 2) continue;
    indexes_[p].buckets[KeyOf(indexes_[p], &grid_[row * k_])].push_back(row);
  }
}

void ChainSampler::Retract(size_t row) {
  for (size_t p = 0; p < indexes_.size(); ++p) {
    if (dcs_[phi_[unit_][p]].arity != 2) continue;
    auto it = indexes_[p].buckets.find(KeyOf(indexes_[p], &grid_[row * k_]));
    if (it == indexes_[p].buckets.end()) continue;
    std::vector<size_t>& rows = it->second;
    auto pos = std::find(rows.begin(), rows.end(), row);
    if (pos != rows.end()) {
      *pos = rows.back();
      rows.pop_back();
    }
  }
}

void ChainSampler::Assign(size_t row, std::span<const double> values) {
  const Unit& unit = model_->units[unit_];
  for (size_t i = 0; i < unit.size(); ++i)
    grid_[row * k_ + unit[i]] = values[i];
}

void ChainSampler::SetCell(size_t row, size_t attr, double value) {
  grid_[row * k_ + attr] = value;
}

std::vector<size_t> ChainSampler::Violations(
    size_t row, std::span<const double> values) const {
  const Unit& unit = model_->units[unit_];
  std::vector<double> buf(grid_.begin() + row * k_,
                          grid_.begin() + (row + 1) * k_);
  for (size_t i = 0; i < unit.size(); ++i) buf[unit[i]] = values[i];
  std::vector<size_t> out(phi_[unit_].size(), 0);
  for (size_t p = 0; p < out.size(); ++p) {
    const DenialConstraint& dc = dcs_[phi_[unit_][p]];
    if (dc.arity == 1) {
      out[p] = dc.HoldsOn(buf.data(), buf.data()) ? 1 : 0;
      continue;
    }
    auto it = indexes_[p].buckets.find(KeyOf(indexes_[p], buf.data()));
    if (it == indexes_[p].buckets.end()) continue;
    for (size_t r : it->second) {
      if (r != row && dc.PairViolates(buf.data(), &grid_[r * k_])) ++out[p];
    }
  }
  return out;
}

double ChainSampler::Penalty(std::span<const size_t> vio) const {
  double penalty = 0.0;
  for (size_t p = 0; p < vio.size(); ++p) {
    if (vio[p] > 0) penalty += weights_[phi_[unit_][p]] * vio[p];
  }
  return penalty;
}

void ChainSampler::BaseDistribution(size_t row, RandomSource& rng,
                                    CellDistribution* dist) const {
  const Schema& schema = model_->schema;
  const Unit& unit = model_->units[unit_];
  std::vector<double> buf(k_);
  auto add_value = [&](size_t index, double base) {
    DecodeUnitValue(schema, unit, index, buf.data(), rng);
    std::vector<double> values;
    for (size_t a : unit) values.push_back(buf[a]);
    dist->candidates.push_back(std::move(values));
    dist->base.push_back(base);
  };
  if (model_->histograms[unit_]) {
    const std::vector<double>& probs = model_->histograms[unit_]->probs;
    for (size_t v = 0; v < probs.size(); ++v) add_value(v, probs[v]);
    return;
  }
  const SubModel& sub = *model_->submodels[unit_];
  Prediction pred;
  sub.PredictInto(&grid_[row * k_], &pred);
  if (!sub.numerical_target()) {
    for (size_t v = 0; v < pred.probs.size(); ++v) add_value(v, pred.probs[v]);
    return;
  }
  const AttributeSpec& spec = schema.attribute(unit[0]);
  for (int c = 0; c < options_.n_candidates; ++c) {
    const double x =
        std::clamp(rng.Normal(pred.mean, pred.stddev), spec.lo, spec.hi);
    const double z = (x - pred.mean) / pred.stddev;
    dist->candidates.push_back({x});
    dist->base.push_back(std::exp(-0.5 * z * z));
  }
}

bool ChainSampler::FastPath(size_t row, CellDistribution* dist) const {
  const size_t attr = model_->units[unit_][0];
  for (size_t l : fds_[unit_]) {
    const size_t p =
        std::lower_bound(phi_[unit_].begin(), phi_[unit_].end(), l) -
        phi_[unit_].begin();
    auto it = indexes_[p].buckets.find(KeyOf(indexes_[p], &grid_[row * k_]));
    if (it == indexes_[p].buckets.end()) continue;
    double seen = std::numeric_limits<double>::quiet_NaN();
    for (size_t r : it->second) {
      if (r == row) continue;
      const double v = grid_[r * k_ + attr];
      if (std::isnan(seen)) {
        seen = v;
      } else if (v != seen) {
        return false;
      }
    }
    if (std::isnan(seen)) continue;
    std::vector<size_t> vio = Violations(row, std::vector<double>{seen});
    for (size_t q = 0; q < vio.size(); ++q) {
      if (vio[q] > 0 && dcs_[phi_[unit_][q]].hard) return false;
    }
    dist->candidates = {{seen}};
    dist->base = {1.0};
    dist->dcs = phi_[unit_];
    dist->violations = {std::move(vio)};
    dist->probs = {1.0};
    dist->fast_path = true;
    return true;
  }
  return false;
}

CellDistribution ChainSampler::Distribution(size_t row,
                                            RandomSource& rng) const {
  CellDistribution dist;
  if (options_.fd_fast_path && FastPath(row, &dist)) return dist;
  BaseDistribution(row, rng, &dist);
  dist.dcs = phi_[unit_];
  dist.violations.reserve(dist.candidates.size());
  for (const std::vector<double>& c : dist.candidates) {
    dist.violations.push_back(Violations(row, c));
  }
  FinalizeDistribution(dist, weights_);
  return dist;
}

std::vector<double> ChainSampler::AcceptReject(size_t row, RandomSource& rng,
                                               SampleStats* stats) const {
  const Schema& schema = model_->schema;
  const Unit& unit = model_->units[unit_];
  std::vector<double> buf(k_);
  std::vector<double> values(unit.size());
  Prediction pred;
  const bool histogram = model_->histograms[unit_].has_value();
  if (!histogram)
    model_->submodels[unit_]->PredictInto(&grid_[row * k_], &pred);
  const bool numerical =
      !histogram && model_->submodels[unit_]->numerical_target();
  const std::vector<double>& probs =
      histogram ? model_->histograms[unit_]->probs : pred.probs;
  for (int t = 0; t < options_.max_tries; ++t) {
    if (numerical) {
      const AttributeSpec& spec = schema.attribute(unit[0]);
      values[0] =
          std::clamp(rng.Normal(pred.mean, pred.stddev), spec.lo, spec.hi);
    } else {
      DecodeUnitValue(schema, unit, rng.Categorical(probs), buf.data(), rng);
      for (size_t i = 0; i < unit.size(); ++i) values[i] = buf[unit[i]];
    }
    const double penalty = Penalty(Violations(row, values));
    if (rng.Bernoulli(std::exp(-penalty))) return values;
  }
  if (stats != nullptr) ++stats->exhausted_cells;
  return values;
}

void ChainSampler::FillUnit(size_t unit, RandomSource& rng,
                            SampleStats* stats) {
  BeginUnit(unit);
  for (size_t i = 0; i < n_; ++i) {
    if (options_.accept_reject) {
      Assign(i, AcceptReject(i, rng, stats));
    } else {
      const CellDistribution dist = Distribution(i, rng);
      Assign(i, dist.candidates[DrawCandidate(dist, rng)]);
      if (stats != nullptr) {
        stats->fallback_cells += dist.fallback;
        stats->fast_path_cells += dist.fast_path;
      }
    }
    Admit(i);
  }
  if (options_.accept_reject || n_ == 0) return;
  for (int t = 0; t < options_.mcmc_resamples; ++t) {
    const size_t i = rng.UniformIndex(n_);
    Retract(i);
    const CellDistribution dist = Distribution(i, rng);
    Assign(i, dist.candidates[DrawCandidate(dist, rng)]);
    Admit(i);
  }
}

absl::StatusOr<Dataset> ChainSampler::ToDataset() const {
  std::vector<std::vector<double>> columns(k_, std::vector<double>(n_));
  for (size_t r = 0; r < n_; ++r) {
    for (size_t a = 0; a < k_; ++a) columns[a][r] = grid_[r * k_ + a];
  }
  return Dataset::FromColumns(model_->schema, std::move(columns));
}

absl::StatusOr<Dataset> Synthesize(const ProbModel& model,
                                   std::span<const DenialConstraint> dcs,
                                   std::span<const double> weights,
                                   const SamplerOptions& options,
                                   RandomSource& rng, SampleStats* stats) {
  KAMINO_ASSIGN_OR_RETURN(ChainSampler sampler,
                          ChainSampler::Create(model, dcs, weights, options));
  for (size_t u = 0; u < sampler.num_units(); ++u) {
    RandomSource unit_rng = rng.Child(absl::StrCat("unit/", u));
    sampler.FillUnit(u, unit_rng, stats);
  }
  return sampler.ToDataset();
}

}  // namespace kamino
