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

#include "kamino/dp_model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "absl/strings/str_cat.h"
#include "kamino/status.h"
#include "nlohmann/json.hpp"

namespace kamino {
namespace {

std::vector<double> RowMajor(const Dataset& data) {
  const size_t n = data.num_rows(), k = data.num_attributes();
  std::vector<double> flat(n * k);
  for (size_t a = 0; a < k; ++a) {
    std::span<const double> col = data.column(a);
    for (size_t r = 0; r < n; ++r) flat[r * k + a] = col[r];
  }
  return flat;
}

// Indices of a Poisson sample at `rate`, by geometric gaps.
void PoissonSample(size_t n, double rate, RandomSource& rng,
                   std::vector<size_t>* out) {
  out->clear();
  if (rate >= 1.0) {
    for (size_t i = 0; i < n; ++i) out->push_back(i);
    return;
  }
  if (rate <= 0.0) return;
  const double log_q = std::log1p(-rate);
  double pos = -1.0;
  while (true) {
    pos += 1.0 + std::floor(std::log(1.0 - rng.Uniform()) / log_q);
    if (pos >= static_cast<double>(n)) break;
    out->push_back(static_cast<size_t>(pos));
  }
}

struct UnitPlan {
  bool histogram = true;
  std::vector<size_t> context;
};

std::vector<UnitPlan> Plan(const Schema& schema, const SchemaSequence& seq,
                           const std::vector<Unit>& units) {
  (void)schema;
  std::vector<UnitPlan> plans(units.size());
  std::vector<size_t> context;
  for (size_t u = 0; u < units.size(); ++u) {
    const bool fallback = units[u].size() == 1 && seq.IsFallback(units[u][0]);
    plans[u].histogram = u == 0 || fallback || context.empty();
    if (!plans[u].histogram) plans[u].context = context;
    if (!fallback) {
      for (size_t a : units[u]) context.push_back(a);
    }
  }
  return plans;
}

}  // namespace

NoisyHistogram FitHistogram(const Dataset& data, const Unit& unit,
                            double sigma_g, RandomSource& rng) {
  const Schema& schema = data.schema();
  NoisyHistogram hist;
  hist.unit = unit;
  hist.counts.assign(UnitDomainSize(schema, unit), 0.0);
  std::vector<double> row(data.num_attributes());
  for (size_t r = 0; r < data.num_rows(); ++r) {
    for (size_t a : unit) row[a] = data.at(r, a);
    hist.counts[UnitValueIndex(schema, unit, row.data())] += 1.0;
  }
  const double noise_sd = std::sqrt(2.0) * sigma_g;
  double total = 0.0;
  hist.probs.resize(hist.counts.size());
  for (size_t v = 0; v < hist.counts.size(); ++v) {
    if (noise_sd > 0) hist.counts[v] += rng.Normal(0.0, noise_sd);
    hist.probs[v] = std::max(0.0, hist.counts[v]);
    total += hist.probs[v];
  }
  for (double& p : hist.probs) {
    p = total > 0 ? p / total : 1.0 / static_cast<double>(hist.probs.size());
  }
  return hist;
}

double ClipGradient(std::span<double> grad, double clip_norm) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > clip_norm) {
    const double factor = clip_norm / norm;
    for (double& g : grad) g *= factor;
  }
  return norm;
}

TrainStats TrainSubmodel(SubModel& model, const Dataset& data,
                         const DpsgdOptions& options, RandomSource& rng,
                         const StepObserver& observer) {
  TrainStats stats;
  const size_t n = data.num_rows(), k = data.num_attributes();
  if (n == 0) return stats;
  const std::vector<double> rows = RowMajor(data);
  const size_t P = model.num_params();
  const double rate =
      std::min(1.0, options.batch_size / static_cast<double>(n));
  const double denom = std::min(options.batch_size, static_cast<double>(n));
  const double noise_sd = options.noise_multiplier * options.clip_norm;
  const bool add_noise =
      options.noise_multiplier > 0 && std::isfinite(noise_sd);

  std::vector<double> sum(P), grad(P);
  std::vector<size_t> batch;
  std::vector<double> raw_norms, clipped_norms;
  for (int t = 0; t < options.iterations; ++t) {
    PoissonSample(n, rate, rng, &batch);
    stats.row_accesses += batch.size();
    std::fill(sum.begin(), sum.end(), 0.0);
    raw_norms.clear();
    clipped_norms.clear();
    for (size_t r : batch) {
      std::fill(grad.begin(), grad.end(), 0.0);
      model.Loss(rows.data() + r * k, grad);
      const double norm = ClipGradient(grad, options.clip_norm);
      for (size_t j = 0; j < P; ++j) sum[j] += grad[j];
      raw_norms.push_back(norm);
      double sq = 0.0;
      for (double g : grad) sq += g * g;
      clipped_norms.push_back(std::sqrt(sq));
    }
    if (add_noise) {
      for (size_t j = 0; j < P; ++j) sum[j] += rng.Normal(0.0, noise_sd);
      ++stats.noise_draws;
    }
    std::vector<double>& params = model.params();
    const double step = options.learning_rate / denom;
    for (size_t j = 0; j < P; ++j) params[j] -= step * sum[j];
    ++stats.steps;
    if (observer) {
      observer(StepInfo{t, batch, raw_norms, clipped_norms, add_noise, params});
    }
  }
  return stats;
}

std::vector<double> FullBatchGradient(const SubModel& model,
                                      const Dataset& data) {
  const size_t n = data.num_rows(), k = data.num_attributes();
  const std::vector<double> rows = RowMajor(data);
  std::vector<double> grad(model.num_params(), 0.0);
  for (size_t r = 0; r < n; ++r) model.Loss(rows.data() + r * k, grad);
  for (double& g : grad) g /= static_cast<double>(n);
  return grad;
}

ModelShape PlanShape(const Schema& schema, const SchemaSequence& sequence) {
  const std::vector<Unit> units = sequence.Units();
  ModelShape shape{0, 0};
  for (const UnitPlan& p : Plan(schema, sequence, units)) {
    (p.histogram ? shape.num_histograms : shape.num_submodels) += 1;
  }
  return shape;
}

ModelShape ProbModel::Shape() const {
  ModelShape shape{0, 0};
  for (size_t u = 0; u < units.size(); ++u) {
    if (histograms[u]) ++shape.num_histograms;
    if (submodels[u]) ++shape.num_submodels;
  }
  return shape;
}

absl::StatusOr<ProbModel> FitModel(const Dataset& data,
                                   const SchemaSequence& sequence,
                                   const PrivacyConfig& config,
                                   RandomSource& rng, bool parallel,
                                   FitStats* stats) {
  ProbModel model;
  model.schema = data.schema();
  model.sequence = sequence;
  model.units = sequence.Units();
  model.embed_dim = config.embed_dim;
  const size_t num_units = model.units.size();
  model.histograms.resize(num_units);
  model.submodels.resize(num_units);
  const std::vector<UnitPlan> plans = Plan(model.schema, sequence, model.units);

  FitStats local;
  local.per_unit.resize(num_units);
  for (size_t u = 0; u < num_units; ++u) {
    if (!plans[u].histogram) continue;
    RandomSource hist_rng = rng.Child(absl::StrCat("histogram/", u));
    model.histograms[u] =
        FitHistogram(data, model.units[u], config.sigma_g, hist_rng);
    local.per_unit[u].row_accesses = data.num_rows();
  }

  const DpsgdOptions options{config.sigma_d, config.clip_norm,
                             config.batch_size, config.iterations,
                             config.learning_rate};
  auto build = [&](size_t u) -> absl::Status {
    RandomSource init_rng = rng.Child(absl::StrCat("init/", u));
    KAMINO_ASSIGN_OR_RETURN(
        SubModel sub,
        SubModel::Create(model.schema, plans[u].context, model.units[u],
                         config.embed_dim, init_rng));
    model.submodels[u] = std::move(sub);
    return absl::OkStatus();
  };
  auto train = [&](size_t u) {
    RandomSource train_rng = rng.Child(absl::StrCat("train/", u));
    local.per_unit[u] =
        TrainSubmodel(*model.submodels[u], data, options, train_rng);
  };

  if (parallel) {
    for (size_t u = 0; u < num_units; ++u) {
      if (!plans[u].histogram) KAMINO_RETURN_IF_ERROR(build(u));
    }
    std::vector<std::thread> workers;
    for (size_t u = 0; u < num_units; ++u) {
      if (!plans[u].histogram) workers.emplace_back(train, u);
    }
    for (std::thread& w : workers) w.join();
  } else {
    EmbeddingStore store;
    for (size_t u = 0; u < num_units; ++u) {
      if (plans[u].histogram) continue;
      KAMINO_RETURN_IF_ERROR(build(u));
      model.submodels[u]->WarmStart(store);
      train(u);
      model.submodels[u]->Export(&store);
    }
  }

  for (const TrainStats& s : local.per_unit) {
    local.row_accesses += s.row_accesses;
    local.noise_draws += s.noise_draws;
  }
  if (stats != nullptr) *stats = std::move(local);
  return model;
}

nlohmann::json ProbModel::ToJson() const {
  nlohmann::json json;
  json["schema"] = schema.ToJson();
  json["sequence"] = sequence.ToJson(schema);
  json["embed_dim"] = embed_dim;
  json["units"] = nlohmann::json::array();
  for (size_t u = 0; u < units.size(); ++u) {
    nlohmann::json item;
    item["attributes"] = nlohmann::json::array();
    for (size_t a : units[u])
      item["attributes"].push_back(schema.attribute(a).name);
    if (histograms[u]) {
      item["kind"] = "histogram";
      item["noisy_counts"] = histograms[u]->counts;
      item["probs"] = histograms[u]->probs;
    } else {
      item["kind"] = "submodel";
      item["submodel"] = submodels[u]->ToJson(schema);
    }
    json["units"].push_back(std::move(item));
  }
  return json;
}

absl::StatusOr<ProbModel> ProbModel::FromJson(const nlohmann::json& json) {
  ProbModel model;
  try {
    KAMINO_ASSIGN_OR_RETURN(model.schema, Schema::FromJson(json.at("schema")));
    KAMINO_ASSIGN_OR_RETURN(
        model.sequence,
        SchemaSequence::FromJson(json.at("sequence"), model.schema));
    model.embed_dim = json.value("embed_dim", 16);
    model.units = model.sequence.Units();
    const auto& items = json.at("units");
    if (items.size() != model.units.size()) {
      return MakeError(ErrorKind::kSchemaMismatch, "unit count mismatch");
    }
    model.histograms.resize(model.units.size());
    model.submodels.resize(model.units.size());
    for (size_t u = 0; u < model.units.size(); ++u) {
      const auto& item = items[u];
      if (item.at("kind") == "histogram") {
        NoisyHistogram h;
        h.unit = model.units[u];
        h.counts = item.at("noisy_counts").get<std::vector<double>>();
        h.probs = item.at("probs").get<std::vector<double>>();
        if (h.probs.size() != UnitDomainSize(model.schema, h.unit)) {
          return MakeError(ErrorKind::kSchemaMismatch,
                           "histogram size mismatch");
        }
        model.histograms[u] = std::move(h);
      } else {
        KAMINO_ASSIGN_OR_RETURN(
            SubModel sub,
            SubModel::FromJson(item.at("submodel"), model.schema));
        model.submodels[u] = std::move(sub);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    return MakeError(ErrorKind::kParseError, e.what());
  }
  return model;
}

}  // namespace kamino
