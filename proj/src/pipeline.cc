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

#include "kamino/pipeline.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "absl/strings/str_cat.h"
#include "kamino/evaluator.h"
#include "kamino/random.h"
#include "kamino/status.h"
#include "kamino/units.h"
#include "kamino/weight_learner.h"
#include "nlohmann/json.hpp"

namespace kamino {
namespace {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>* out) : out_(out) {}
  void Lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    out_->push_back(
        {stage, std::chrono::duration<double>(now - start_).count()});
    start_ = now;
  }

 private:
  std::vector<StageTiming>* out_;
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

absl::Status WriteJson(const std::filesystem::path& path,
                       const nlohmann::json& json) {
  std::ofstream out(path);
  if (!out) {
    return MakeError(ErrorKind::kIoError,
                     absl::StrCat("cannot write '", path.string(), "'"));
  }
  out << json.dump(2) << "\n";
  return out ? absl::OkStatus()
             : MakeError(ErrorKind::kIoError, absl::StrCat("write failed for '",
                                                           path.string(), "'"));
}

nlohmann::json WeightJson(double w) {
  if (std::isinf(w)) return "inf";
  return w;
}

}  // namespace

absl::StatusOr<RunResult> RunSynthesis(const Dataset& data,
                                       std::span<const DenialConstraint> dcs,
                                       const RunOptions& options) {
  if (!(options.epsilon > 0)) {
    return MakeError(ErrorKind::kOutOfRange, "epsilon must be positive");
  }
  if (!(options.delta > 0 && options.delta < 1)) {
    return MakeError(ErrorKind::kOutOfRange, "delta must lie in (0, 1)");
  }
  const size_t n = data.num_rows();
  if (n == 0) return MakeError(ErrorKind::kOutOfRange, "empty input instance");
  const Schema& schema = data.schema();
  RunResult result;
  result.input_rows = n;
  StageClock clock(&result.timings);
  const RandomSource root(options.seed, "kamino");

  result.sequence = Sequence(schema, dcs);
  result.sequence = ApplyDomainOptimizations(result.sequence, schema, dcs,
                                             options.thresholds);
  clock.Lap("sequencing");

  const std::vector<size_t> learnable = LearnableConstraints(dcs);
  SearchRequest request;
  request.epsilon = options.epsilon;
  request.delta = options.delta;
  request.n = n;
  request.shape = PlanShape(schema, result.sequence);
  request.first_domain_size =
      UnitDomainSize(schema, result.sequence.Units()[0]);
  request.weights_unknown = !learnable.empty();
  request.sigma_g = options.sigma_g;
  request.sigma_d = options.sigma_d;
  request.sigma_w = options.sigma_w;
  request.batch_size = options.batch_size;
  request.iterations = options.iterations;
  KAMINO_ASSIGN_OR_RETURN(result.config,
                          SearchParameters(request, options.base));
  result.config.mcmc_resamples = options.mcmc_resamples;

  std::vector<DenialConstraint> to_learn;
  for (size_t l : learnable) to_learn.push_back(dcs[l]);
  if (!to_learn.empty()) {
    KAMINO_ASSIGN_OR_RETURN(
        result.config.weight_sensitivity,
        Sensitivity(to_learn,
                    static_cast<size_t>(result.config.weight_sample_size)));
  }
  KAMINO_ASSIGN_OR_RETURN(
      result.budget, Account(result.config, n, request.shape, options.delta));
  if (result.budget.eps.epsilon > options.epsilon) {
    return MakeError(
        ErrorKind::kBudgetInfeasible,
        absl::StrCat("resolved parameters spend epsilon ",
                     result.budget.eps.epsilon, " > ", options.epsilon));
  }
  clock.Lap("search");

  RandomSource train_rng = root.Child("train");
  KAMINO_ASSIGN_OR_RETURN(
      result.model, FitModel(data, result.sequence, result.config, train_rng,
                             options.parallel, &result.fit_stats));
  clock.Lap("training");

  std::vector<double> learned;
  if (!to_learn.empty()) {
    RandomSource weight_rng = root.Child("weights");
    const ViolationMatrix matrix = BuildNoisyMatrix(
        data, to_learn, static_cast<size_t>(result.config.weight_sample_size),
        result.config.sigma_w, result.config.weight_sensitivity, weight_rng);
    result.weight_sample_rows = matrix.rows.size();
    WeightOptions wopts;
    wopts.iterations = result.config.weight_iterations;
    wopts.batch_size = result.config.weight_batch_size;
    wopts.learning_rate = result.config.weight_learning_rate;
    wopts.w_max = result.config.weight_max;
    KAMINO_ASSIGN_OR_RETURN(
        learned, LearnWeights(matrix, to_learn, result.sequence, schema.size(),
                              wopts, weight_rng));
    result.learned_weights = true;
  }
  result.weights = ResolveWeights(dcs, learned);
  clock.Lap("weights");

  SamplerOptions sopts;
  sopts.num_rows = options.output_rows.value_or(n);
  sopts.mcmc_resamples = options.mcmc_resamples;
  sopts.n_candidates = result.config.n_candidates;
  sopts.accept_reject = options.accept_reject;
  RandomSource sample_rng = root.Child("sample");
  KAMINO_ASSIGN_OR_RETURN(result.synthetic,
                          Synthesize(result.model, dcs, result.weights, sopts,
                                     sample_rng, &result.sample_stats));
  clock.Lap("sampling");
  return result;
}

nlohmann::json Manifest(const RunResult& result,
                        std::span<const DenialConstraint> dcs,
                        const RunOptions& options,
                        const nlohmann::json& inputs) {
  nlohmann::json json;
  json["inputs"] = inputs;
  json["seed"] = options.seed;
  json["epsilon_target"] = options.epsilon;
  json["delta"] = options.delta;
  json["mode"] = {{"parallel", options.parallel},
                  {"accept_reject", options.accept_reject},
                  {"mcmc_resamples", options.mcmc_resamples}};
  json["rows"] = {{"input", result.input_rows},
                  {"output", result.synthetic.num_rows()}};
  json["config"] = result.config.ToJson();
  json["shape"] = {{"num_histograms", result.model.Shape().num_histograms},
                   {"num_submodels", result.model.Shape().num_submodels}};
  json["sequence"] = result.sequence.ToJson(result.model.schema);
  json["epsilon"] = result.budget.eps.epsilon;
  json["alpha"] = result.budget.eps.alpha;
  json["learned_weights"] = result.learned_weights;
  nlohmann::json weights = nlohmann::json::object();
  for (size_t l = 0; l < dcs.size(); ++l)
    weights[dcs[l].id] = WeightJson(result.weights[l]);
  json["weights"] = weights;
  json["private_accesses"] = {
      {"training_rows", result.fit_stats.row_accesses},
      {"noise_draws", result.fit_stats.noise_draws},
      {"weight_sample_rows", result.weight_sample_rows}};
  json["sampling"] = {{"fallback_cells", result.sample_stats.fallback_cells},
                      {"fast_path_cells", result.sample_stats.fast_path_cells},
                      {"exhausted_cells", result.sample_stats.exhausted_cells}};
  nlohmann::json timings = nlohmann::json::object();
  double total = 0.0;
  for (const StageTiming& t : result.timings) {
    timings[t.stage] = t.seconds;
    total += t.seconds;
  }
  timings["total"] = total;
  json["timings_seconds"] = timings;
  return json;
}

absl::Status WriteArtifacts(const RunResult& result,
                            std::span<const DenialConstraint> dcs,
                            const RunOptions& options, const std::string& dir,
                            const nlohmann::json& inputs) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return MakeError(ErrorKind::kIoError,
                     absl::StrCat("cannot create '", dir, "': ", ec.message()));
  }
  const std::filesystem::path root(dir);
  KAMINO_RETURN_IF_ERROR(
      WriteCsvFile(result.synthetic, (root / "synthetic.csv").string()));
  nlohmann::json model = result.model.ToJson();
  nlohmann::json weights = nlohmann::json::object();
  for (size_t l = 0; l < dcs.size(); ++l)
    weights[dcs[l].id] = WeightJson(result.weights[l]);
  model["weights"] = weights;
  KAMINO_RETURN_IF_ERROR(WriteJson(root / "model.json", model));
  KAMINO_RETURN_IF_ERROR(
      WriteJson(root / "budget.json", result.budget.ToJson()));
  KAMINO_RETURN_IF_ERROR(WriteJson(root / "violations.json",
                                   ViolationSummary(dcs, result.synthetic)));
  return WriteJson(root / "manifest.json",
                   Manifest(result, dcs, options, inputs));
}

}  // namespace kamino
