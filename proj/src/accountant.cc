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

#include "kamino/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "kamino/status.h"
#include "nlohmann/json.hpp"

namespace kamino {
namespace {

absl::Status CheckOrder(int alpha) {
  if (alpha < 2) {
    return MakeError(ErrorKind::kInvalidOrder,
                     absl::StrCat("order ", alpha, " is below 2"));
  }
  return absl::OkStatus();
}

absl::Status CheckSigma(double sigma) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    return MakeError(ErrorKind::kOutOfRange,
                     absl::StrCat("noise multiplier ", sigma,
                                  " must be positive and finite"));
  }
  return absl::OkStatus();
}

double LogBinomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

nlohmann::json CurveJson(const RdpCurve& curve) {
  return nlohmann::json(curve.values());
}

}  // namespace

absl::StatusOr<double> GaussianRdp(double sigma, int alpha) {
  KAMINO_RETURN_IF_ERROR(CheckOrder(alpha));
  KAMINO_RETURN_IF_ERROR(CheckSigma(sigma));
  return alpha / (2.0 * sigma * sigma);
}

absl::StatusOr<double> SgmRdp(double sigma, double rate, int alpha) {
  KAMINO_RETURN_IF_ERROR(CheckOrder(alpha));
  KAMINO_RETURN_IF_ERROR(CheckSigma(sigma));
  if (!(rate >= 0.0 && rate <= 1.0)) {
    return MakeError(ErrorKind::kInvalidRate,
                     absl::StrCat("sampling rate ", rate, " outside [0, 1]"));
  }
  if (rate == 0.0) return 0.0;
  if (rate == 1.0) return GaussianRdp(sigma, alpha);
  const double log_r = std::log(rate);
  const double log_1mr = std::log1p(-rate);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> terms(alpha + 1);
  double peak = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= alpha; ++k) {
    terms[k] = LogBinomial(alpha, k) + (alpha - k) * log_1mr + k * log_r +
               static_cast<double>(k) * (k - 1) * inv;
    peak = std::max(peak, terms[k]);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - peak);
  // The sum is >= 1 exactly; clamp rounding below zero.
  return std::max(0.0, (peak + std::log(sum)) / (alpha - 1));
}

RdpCurve RdpCurve::Zero(int alpha_max) {
  return RdpCurve(std::vector<double>(std::max(0, alpha_max - 1), 0.0));
}

absl::StatusOr<RdpCurve> RdpCurve::Gaussian(double sigma, int alpha_max) {
  KAMINO_RETURN_IF_ERROR(CheckOrder(alpha_max));
  std::vector<double> values;
  for (int a = 2; a <= alpha_max; ++a) {
    KAMINO_ASSIGN_OR_RETURN(double v, GaussianRdp(sigma, a));
    values.push_back(v);
  }
  return RdpCurve(std::move(values));
}

absl::StatusOr<RdpCurve> RdpCurve::Sgm(double sigma, double rate,
                                       int alpha_max) {
  KAMINO_RETURN_IF_ERROR(CheckOrder(alpha_max));
  std::vector<double> values;
  for (int a = 2; a <= alpha_max; ++a) {
    KAMINO_ASSIGN_OR_RETURN(double v, SgmRdp(sigma, rate, a));
    values.push_back(v);
  }
  return RdpCurve(std::move(values));
}

RdpCurve RdpCurve::Scaled(double factor) const {
  std::vector<double> out = values_;
  for (double& v : out) v *= factor;
  return RdpCurve(std::move(out));
}

RdpCurve RdpCurve::operator+(const RdpCurve& other) const {
  std::vector<double> out(std::min(values_.size(), other.values_.size()));
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = values_[i] + other.values_[i];
  return RdpCurve(std::move(out));
}

absl::StatusOr<EpsDelta> ToEpsDelta(const RdpCurve& curve, double delta) {
  if (curve.empty()) return MakeError(ErrorKind::kEmptyCurve, "no orders");
  if (!(delta > 0 && delta < 1)) {
    return MakeError(ErrorKind::kOutOfRange,
                     absl::StrCat("delta ", delta, " outside (0, 1)"));
  }
  const double log_inv_delta = -std::log(delta);
  EpsDelta best{std::numeric_limits<double>::infinity(), 2};
  for (int a = 2; a <= curve.alpha_max(); ++a) {
    const double eps = curve.at(a) + log_inv_delta / (a - 1);
    if (eps < best.epsilon) best = {eps, a};
  }
  return best;
}

nlohmann::json PrivacyConfig::ToJson() const {
  return nlohmann::json{
      {"sigma_g", sigma_g},
      {"sigma_d", sigma_d},
      {"sigma_w", sigma_w},
      {"clip_norm", clip_norm},
      {"batch_size", batch_size},
      {"iterations", iterations},
      {"learning_rate", learning_rate},
      {"weight_sample_size", weight_sample_size},
      {"weight_batch_size", weight_batch_size},
      {"weight_iterations", weight_iterations},
      {"weight_sensitivity", weight_sensitivity},
      {"weight_max", weight_max},
      {"weight_learning_rate", weight_learning_rate},
      {"embed_dim", embed_dim},
      {"n_candidates", n_candidates},
      {"mcmc_resamples", mcmc_resamples},
      {"learn_weights", learn_weights},
      {"alpha_max", alpha_max},
      {"search_phase", search_phase},
  };
}

absl::StatusOr<PrivacyConfig> PrivacyConfig::FromJson(
    const nlohmann::json& json) {
  if (!json.is_object()) {
    return MakeError(ErrorKind::kParseError, "configuration must be an object");
  }
  PrivacyConfig c;
  try {
    c.sigma_g = json.value("sigma_g", c.sigma_g);
    c.sigma_d = json.value("sigma_d", c.sigma_d);
    c.sigma_w = json.value("sigma_w", c.sigma_w);
    c.clip_norm = json.value("clip_norm", c.clip_norm);
    c.batch_size = json.value("batch_size", c.batch_size);
    c.iterations = json.value("iterations", c.iterations);
    c.learning_rate = json.value("learning_rate", c.learning_rate);
    c.weight_sample_size =
        json.value("weight_sample_size", c.weight_sample_size);
    c.weight_batch_size = json.value("weight_batch_size", c.weight_batch_size);
    c.weight_iterations = json.value("weight_iterations", c.weight_iterations);
    c.weight_sensitivity =
        json.value("weight_sensitivity", c.weight_sensitivity);
    c.weight_max = json.value("weight_max", c.weight_max);
    c.weight_learning_rate =
        json.value("weight_learning_rate", c.weight_learning_rate);
    c.embed_dim = json.value("embed_dim", c.embed_dim);
    c.n_candidates = json.value("n_candidates", c.n_candidates);
    c.mcmc_resamples = json.value("mcmc_resamples", c.mcmc_resamples);
    c.learn_weights = json.value("learn_weights", c.learn_weights);
    c.alpha_max = json.value("alpha_max", c.alpha_max);
    c.search_phase = json.value("search_phase", c.search_phase);
  } catch (const nlohmann::json::exception& e) {
    return MakeError(ErrorKind::kParseError, e.what());
  }
  if (!(c.sigma_g > 0 && c.sigma_d >= 0 && c.sigma_w >= 0 && c.clip_norm > 0 &&
        c.batch_size > 0 && c.iterations >= 0 && c.learning_rate > 0 &&
        c.weight_sample_size > 0 && c.weight_batch_size > 0 &&
        c.embed_dim > 0 && c.n_candidates > 0 && c.mcmc_resamples >= 0 &&
        c.alpha_max >= 2)) {
    return MakeError(ErrorKind::kOutOfRange,
                     "configuration has a non-positive knob");
  }
  return c;
}

absl::StatusOr<BudgetReport> Account(const PrivacyConfig& config, size_t n,
                                     const ModelShape& shape, double delta) {
  if (n == 0) return MakeError(ErrorKind::kOutOfRange, "empty dataset");
  BudgetReport report;
  report.delta = delta;
  report.learn_weights = config.learn_weights;
  const int amax = config.alpha_max;

  StageCost hist{"histogram",
                 static_cast<double>(shape.num_histograms),
                 config.sigma_g,
                 1.0,
                 {}};
  KAMINO_ASSIGN_OR_RETURN(RdpCurve g, RdpCurve::Gaussian(config.sigma_g, amax));
  hist.curve = g.Scaled(hist.multiplier);

  const double steps =
      static_cast<double>(config.iterations) * shape.num_submodels;
  const double rate = std::min(1.0, config.batch_size / n);
  StageCost train{"training", steps, config.sigma_d, rate, {}};
  if (steps > 0) {
    KAMINO_ASSIGN_OR_RETURN(RdpCurve s,
                            RdpCurve::Sgm(config.sigma_d, rate, amax));
    train.curve = s.Scaled(steps);
  } else {
    train.curve = RdpCurve::Zero(amax);
  }

  const double wrate =
      std::min(1.0, static_cast<double>(config.weight_sample_size) / n);
  StageCost weights{
      "weights", config.learn_weights ? 1.0 : 0.0, config.sigma_w, wrate, {}};
  if (config.learn_weights) {
    KAMINO_ASSIGN_OR_RETURN(weights.curve,
                            RdpCurve::Sgm(config.sigma_w, wrate, amax));
  } else {
    weights.curve = RdpCurve::Zero(amax);
  }

  report.total = hist.curve + train.curve + weights.curve;
  report.stages = {std::move(hist), std::move(train), std::move(weights)};
  KAMINO_ASSIGN_OR_RETURN(report.eps, ToEpsDelta(report.total, delta));
  return report;
}

absl::StatusOr<double> TotalRdp(const PrivacyConfig& config, size_t n,
                                const ModelShape& shape, int alpha) {
  KAMINO_RETURN_IF_ERROR(CheckOrder(alpha));
  KAMINO_ASSIGN_OR_RETURN(double hist, GaussianRdp(config.sigma_g, alpha));
  double total = shape.num_histograms * hist;
  if (config.iterations > 0 && shape.num_submodels > 0) {
    KAMINO_ASSIGN_OR_RETURN(
        double step,
        SgmRdp(config.sigma_d, std::min(1.0, config.batch_size / n), alpha));
    total +=
        static_cast<double>(config.iterations) * shape.num_submodels * step;
  }
  if (config.learn_weights) {
    KAMINO_ASSIGN_OR_RETURN(
        double w,
        SgmRdp(
            config.sigma_w,
            std::min(1.0, static_cast<double>(config.weight_sample_size) / n),
            alpha));
    total += w;
  }
  return total;
}

nlohmann::json BudgetReport::ToJson() const {
  nlohmann::json json;
  json["delta"] = delta;
  json["epsilon"] = eps.epsilon;
  json["alpha"] = eps.alpha;
  json["alpha_min"] = 2;
  json["alpha_max"] = total.alpha_max();
  json["learn_weights"] = learn_weights;
  json["stages"] = nlohmann::json::array();
  for (const StageCost& s : stages) {
    json["stages"].push_back({{"name", s.name},
                              {"count", s.multiplier},
                              {"sigma", s.sigma},
                              {"rate", s.rate},
                              {"curve", CurveJson(s.curve)}});
  }
  json["total_curve"] = CurveJson(total);
  json["sgm_bound"] =
      "sampled Gaussian: 1/(a-1) log sum_k C(a,k) (1-r)^(a-k) r^k "
      "exp(k(k-1)/(2 sigma^2)); Gaussian: a/(2 sigma^2)";
  return json;
}

SearchBounds StandardBounds(const SearchRequest& request) {
  const double n = static_cast<double>(request.n);
  SearchBounds b;
  b.sigma_g_min =
      0.1 / static_cast<double>(std::max<size_t>(1, request.first_domain_size));
  b.sigma_g_max =
      std::max(b.sigma_g_min, 4.0 * std::sqrt(std::log(1.25 / request.delta)) /
                                  request.epsilon);
  b.sigma_d_min = 1.1;
  b.sigma_d_max = 1.5;
  b.batch_min = 16;
  b.batch_max = 32;
  b.iterations_min = std::max(1, static_cast<int>(std::ceil(n / b.batch_min)));
  b.iterations_max = std::max(
      b.iterations_min, static_cast<int>(std::floor(5 * n / b.batch_min)));
  b.sigma_w_min = std::sqrt(2 * std::log(1.25 / request.delta)) / 100.0;
  b.sigma_w_max = std::max(b.sigma_w_min, b.sigma_g_max);
  return b;
}

absl::StatusOr<PrivacyConfig> SearchParameters(const SearchRequest& request,
                                               PrivacyConfig config) {
  if (!(request.epsilon > 0) || !(request.delta > 0 && request.delta < 1)) {
    return MakeError(ErrorKind::kOutOfRange, "need epsilon > 0, 0 < delta < 1");
  }
  if (request.n == 0) return MakeError(ErrorKind::kOutOfRange, "empty dataset");
  SearchBounds bounds = StandardBounds(request);
  config.sigma_g = request.sigma_g.value_or(bounds.sigma_g_min);
  config.sigma_d = request.sigma_d.value_or(bounds.sigma_d_min);
  config.batch_size = request.batch_size.value_or(bounds.batch_max);
  config.iterations = request.iterations.value_or(bounds.iterations_max);
  config.learn_weights = request.weights_unknown;
  if (request.weights_unknown) {
    config.weight_sample_size = static_cast<int>(std::min<size_t>(
        request.n, static_cast<size_t>(config.weight_sample_size)));
    config.weight_batch_size = 1;
    config.weight_iterations =
        static_cast<int>(config.weight_sample_size / config.weight_batch_size);
    config.sigma_w = request.sigma_w.value_or(bounds.sigma_w_min);
  }

  auto epsilon_of = [&](const PrivacyConfig& c) -> absl::StatusOr<double> {
    KAMINO_ASSIGN_OR_RETURN(
        BudgetReport r, Account(c, request.n, request.shape, request.delta));
    return r.eps.epsilon;
  };

  int phase = 1;
  int t_step =
      std::max(1, (bounds.iterations_max - bounds.iterations_min) / 40);
  while (true) {
    KAMINO_ASSIGN_OR_RETURN(double eps, epsilon_of(config));
    if (eps <= request.epsilon) break;
    bool moved = false;
    if (!request.iterations && config.iterations > bounds.iterations_min) {
      config.iterations =
          std::max(bounds.iterations_min, config.iterations - t_step);
      moved = true;
    }
    if (!request.sigma_d && config.sigma_d < bounds.sigma_d_max) {
      config.sigma_d =
          phase == 1 ? std::min(bounds.sigma_d_max, config.sigma_d + 0.02)
                     : std::min(bounds.sigma_d_max, config.sigma_d * 1.05);
      moved = true;
    }
    if (!request.sigma_g && config.sigma_g < bounds.sigma_g_max) {
      config.sigma_g = std::min(bounds.sigma_g_max, config.sigma_g * 1.15);
      moved = true;
    }
    if (!request.batch_size && config.batch_size > bounds.batch_min) {
      config.batch_size = std::max(bounds.batch_min, config.batch_size - 1);
      moved = true;
    }
    if (config.learn_weights && !request.sigma_w &&
        config.sigma_w < bounds.sigma_w_max) {
      config.sigma_w = std::min(bounds.sigma_w_max, config.sigma_w * 1.15);
      moved = true;
    }
    if (moved) continue;
    if (phase == 2) {
      return MakeError(
          ErrorKind::kBudgetInfeasible,
          absl::StrCat("epsilon ", eps, " still exceeds budget ",
                       request.epsilon, " with every knob at its limit"));
    }
    phase = 2;
    const int extended_min = std::max(
        1, static_cast<int>(std::ceil(static_cast<double>(request.n) / 128.0)));
    t_step = std::max(1, (bounds.iterations_min - extended_min) / 40);
    bounds.iterations_min = std::min(bounds.iterations_min, extended_min);
    bounds.sigma_d_max = 8.0;
  }
  config.search_phase = phase;
  return config;
}

}  // namespace kamino
