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

#include "kamino/evaluator.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "kamino/status.h"
#include "kamino/units.h"
#include "kamino/violations.h"
#include "nlohmann/json.hpp"

namespace kamino {
namespace {

const char* MetricName(MarginalMetric metric) {
  return metric == MarginalMetric::kMax ? "max" : "half_l1";
}

std::vector<double> Distances(const std::vector<MarginalEntry>& entries,
                              int alpha) {
  std::vector<double> out;
  for (const MarginalEntry& e : entries) {
    if (e.alpha == alpha) out.push_back(e.distance);
  }
  return out;
}

}  // namespace

double ViolationPercentage(const DenialConstraint& dc, const Dataset& data) {
  const double n = static_cast<double>(data.num_rows());
  const double denom = dc.arity == 1 ? n : n * (n - 1) / 2;
  if (denom <= 0) return 0.0;
  return 100.0 * static_cast<double>(CountViolationsSize(dc, data)) / denom;
}

std::vector<double> Marginal(const Dataset& data,
                             std::span<const size_t> attrs) {
  const Unit unit(attrs.begin(), attrs.end());
  std::vector<double> counts(UnitDomainSize(data.schema(), unit), 0.0);
  std::vector<double> row(data.num_attributes());
  for (size_t r = 0; r < data.num_rows(); ++r) {
    for (size_t a : unit) row[a] = data.at(r, a);
    counts[UnitValueIndex(data.schema(), unit, row.data())] += 1.0;
  }
  if (data.num_rows() > 0) {
    for (double& c : counts) c /= static_cast<double>(data.num_rows());
  }
  return counts;
}

double MarginalDistance(const Dataset& truth, const Dataset& synthetic,
                        std::span<const size_t> attrs, MarginalMetric metric) {
  const std::vector<double> p = Marginal(truth, attrs);
  const std::vector<double> q = Marginal(synthetic, attrs);
  double max = 0.0, sum = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const double d = std::abs(p[i] - q[i]);
    max = std::max(max, d);
    sum += d;
  }
  return metric == MarginalMetric::kMax ? max : 0.5 * sum;
}

double EvaluationReport::MedianDistance(int alpha) const {
  std::vector<double> d = Distances(marginals, alpha);
  if (d.empty()) return 0.0;
  std::sort(d.begin(), d.end());
  const size_t m = d.size() / 2;
  return d.size() % 2 ? d[m] : 0.5 * (d[m - 1] + d[m]);
}

double EvaluationReport::MeanDistance(int alpha) const {
  const std::vector<double> d = Distances(marginals, alpha);
  if (d.empty()) return 0.0;
  double sum = 0.0;
  for (double x : d) sum += x;
  return sum / static_cast<double>(d.size());
}

absl::StatusOr<EvaluationReport> Evaluate(const Dataset& truth,
                                          const Dataset& synthetic,
                                          std::span<const DenialConstraint> dcs,
                                          std::span<const int> alphas,
                                          MarginalMetric metric) {
  if (!(truth.schema() == synthetic.schema())) {
    return MakeError(ErrorKind::kSchemaMismatch,
                     "truth and synthetic instances use different schemas");
  }
  EvaluationReport report;
  report.metric = metric;
  for (const DenialConstraint& dc : dcs) {
    ViolationEntry e;
    e.dc_id = dc.id;
    e.truth = ViolationPercentage(dc, truth);
    e.synthetic = ViolationPercentage(dc, synthetic);
    e.gap = std::abs(e.truth - e.synthetic);
    report.violations.push_back(e);
  }
  const Schema& schema = truth.schema();
  const size_t k = schema.size();
  for (int alpha : alphas) {
    if (alpha != 1 && alpha != 2) {
      return MakeError(ErrorKind::kOutOfRange,
                       absl::StrCat("marginal size ", alpha, " is not 1 or 2"));
    }
    for (size_t a = 0; a < k; ++a) {
      if (alpha == 1) {
        const size_t set[] = {a};
        report.marginals.push_back(
            {1,
             {schema.attribute(a).name},
             MarginalDistance(truth, synthetic, set, metric)});
        continue;
      }
      for (size_t b = a + 1; b < k; ++b) {
        const size_t set[] = {a, b};
        report.marginals.push_back(
            {2,
             {schema.attribute(a).name, schema.attribute(b).name},
             MarginalDistance(truth, synthetic, set, metric)});
      }
    }
  }
  return report;
}

nlohmann::json EvaluationReport::ToJson() const {
  nlohmann::json json;
  json["metric"] = MetricName(metric);
  json["violations"] = nlohmann::json::array();
  for (const ViolationEntry& e : violations) {
    json["violations"].push_back({{"dc", e.dc_id},
                                  {"truth_percent", e.truth},
                                  {"synthetic_percent", e.synthetic},
                                  {"gap", e.gap}});
  }
  json["marginals"] = nlohmann::json::array();
  for (const MarginalEntry& e : marginals) {
    json["marginals"].push_back({{"alpha", e.alpha},
                                 {"attributes", e.attributes},
                                 {"distance", e.distance}});
  }
  nlohmann::json summary = nlohmann::json::object();
  for (int alpha : {1, 2}) {
    if (Distances(marginals, alpha).empty()) continue;
    summary[absl::StrCat(alpha, "-way")] = {{"median", MedianDistance(alpha)},
                                            {"mean", MeanDistance(alpha)}};
  }
  json["summary"] = summary;
  return json;
}

std::string EvaluationReport::ToText() const {
  std::string out;
  size_t width = 10;
  for (const ViolationEntry& e : violations)
    width = std::max(width, e.dc_id.size());
  absl::StrAppendFormat(&out, "%-*s %10s %10s %10s\n", static_cast<int>(width),
                        "constraint", "truth%", "synth%", "gap");
  for (const ViolationEntry& e : violations) {
    absl::StrAppendFormat(&out, "%-*s %10.3f %10.3f %10.3f\n",
                          static_cast<int>(width), e.dc_id, e.truth,
                          e.synthetic, e.gap);
  }
  out += "\n";
  width = 10;
  std::vector<std::string> names;
  for (const MarginalEntry& e : marginals) {
    names.push_back(absl::StrJoin(e.attributes, ","));
    width = std::max(width, names.back().size());
  }
  absl::StrAppendFormat(&out, "%-5s %-*s %10s\n", "alpha",
                        static_cast<int>(width), "attributes",
                        MetricName(metric));
  for (size_t i = 0; i < marginals.size(); ++i) {
    absl::StrAppendFormat(&out, "%-5d %-*s %10.4f\n", marginals[i].alpha,
                          static_cast<int>(width), names[i],
                          marginals[i].distance);
  }
  return out;
}

nlohmann::json ViolationSummary(std::span<const DenialConstraint> dcs,
                                const Dataset& data) {
  nlohmann::json json = nlohmann::json::array();
  for (const DenialConstraint& dc : dcs) {
    json.push_back({{"dc", dc.id},
                    {"hard", dc.hard},
                    {"arity", dc.arity},
                    {"violations", CountViolationsSize(dc, data)},
                    {"percent", ViolationPercentage(dc, data)}});
  }
  return json;
}

}  // namespace kamino
