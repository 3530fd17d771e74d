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

// Random instance generators and brute-force oracles shared by the tests.

#ifndef KAMINO_TESTS_TEST_UTIL_H_
#define KAMINO_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kamino/dataset.h"
#include "kamino/denial_constraint.h"
#include "kamino/dp_model.h"
#include "kamino/random.h"
#include "kamino/schema.h"

namespace kamino::testing {

// k attributes alternating unordered categorical, ordered categorical and
// numerical, with small domains so that random rows collide often.
inline Schema RandomSchema(RandomSource& rng, size_t k) {
  std::vector<AttributeSpec> attrs;
  for (size_t a = 0; a < k; ++a) {
    const std::string name = "a" + std::to_string(a);
    switch (rng.UniformIndex(3)) {
      case 0:
      case 1: {
        std::vector<std::string> values;
        const size_t size = 2 + rng.UniformIndex(3);
        for (size_t v = 0; v < size; ++v)
          values.push_back("v" + std::to_string(v));
        attrs.push_back(
            AttributeSpec::Categorical(name, values, rng.Bernoulli(0.5)));
        break;
      }
      default:
        attrs.push_back(AttributeSpec::Numerical(name, 0, 4, 4));
    }
  }
  return Schema::Create(attrs).value();
}

inline double RandomCell(RandomSource& rng, const AttributeSpec& spec) {
  if (spec.is_categorical()) {
    return static_cast<double>(rng.UniformIndex(spec.categories.size()));
  }
  // Integer grid so that equality predicates fire.
  return static_cast<double>(rng.UniformIndex(5));
}

inline Dataset RandomDataset(RandomSource& rng, const Schema& schema,
                             size_t n) {
  std::vector<std::vector<double>> columns(schema.size());
  for (size_t a = 0; a < schema.size(); ++a) {
    for (size_t r = 0; r < n; ++r) {
      columns[a].push_back(RandomCell(rng, schema.attribute(a)));
    }
  }
  return Dataset::FromColumns(schema, std::move(columns)).value();
}

// Random constraint text over `schema`, valid under the grammar.
inline std::string RandomDcText(RandomSource& rng, const Schema& schema,
                                int arity) {
  static const char* kAllOps[] = {"==", "!=", "<", "<=", ">", ">="};
  const size_t num_preds = 1 + rng.UniformIndex(3);
  std::string text = rng.Bernoulli(0.5) ? "hard !(" : "soft !(";
  for (size_t i = 0; i < num_preds; ++i) {
    if (i) text += " & ";
    const size_t attr = rng.UniformIndex(schema.size());
    const AttributeSpec& spec = schema.attribute(attr);
    const std::string op = kAllOps[rng.UniformIndex(spec.has_order() ? 6 : 2)];
    const int lhs_slot =
        arity == 1 ? 1 : 1 + static_cast<int>(rng.UniformIndex(2));
    text += "t" + std::to_string(lhs_slot) + "." + spec.name + " " + op + " ";
    if (arity == 2 && rng.Bernoulli(0.75)) {
      text += "t" + std::to_string(3 - lhs_slot) + "." + spec.name;
    } else if (spec.is_categorical()) {
      text += spec.categories[rng.UniformIndex(spec.categories.size())];
    } else {
      text += std::to_string(rng.UniformIndex(5));
    }
  }
  // Guarantee the arity-2 constraint really mentions both tuples.
  if (arity == 2) {
    text += " & t1." + schema.attribute(0).name + " == t2." +
            schema.attribute(0).name;
  }
  return text + ")";
}

// Independent predicate evaluation straight from the parsed fields.
inline bool OracleHolds(const DenialConstraint& dc, const Dataset& data,
                        size_t i, size_t j) {
  for (const Predicate& p : dc.predicates) {
    const double lhs = data.at(p.lhs_slot == 0 ? i : j, p.lhs_attr);
    const double rhs = p.rhs_constant
                           ? p.constant
                           : data.at(p.rhs_slot == 0 ? i : j, p.rhs_attr);
    bool ok = false;
    switch (p.op) {
      case CompareOp::kEq:
        ok = lhs == rhs;
        break;
      case CompareOp::kNe:
        ok = lhs != rhs;
        break;
      case CompareOp::kLt:
        ok = lhs < rhs;
        break;
      case CompareOp::kLe:
        ok = lhs <= rhs;
        break;
      case CompareOp::kGt:
        ok = lhs > rhs;
        break;
      case CompareOp::kGe:
        ok = lhs >= rhs;
        break;
    }
    if (!ok) return false;
  }
  return true;
}

// All violating unordered pairs (1-based, i < j) by exhaustive ordered-pair
// enumeration; for arity 1 the pair (i, i).
inline std::set<std::pair<size_t, size_t>> OracleViolations(
    const DenialConstraint& dc, const Dataset& data) {
  std::set<std::pair<size_t, size_t>> out;
  const size_t n = data.num_rows();
  for (size_t i = 0; i < n; ++i) {
    if (dc.arity == 1) {
      if (OracleHolds(dc, data, i, i)) out.insert({i + 1, i + 1});
      continue;
    }
    for (size_t j = 0; j < n; ++j) {
      if (i != j && OracleHolds(dc, data, i, j)) {
        out.insert({std::min(i, j) + 1, std::max(i, j) + 1});
      }
    }
  }
  return out;
}

// A sub-model whose output ignores the context: p = `probs` for a
// categorical target, N(0, 1) for a numerical one.
inline SubModel FixedSubModel(const Schema& schema, std::vector<size_t> context,
                              size_t target, const std::vector<double>& probs) {
  RandomSource rng(0, "fixed");
  SubModel m =
      SubModel::Create(schema, std::move(context), {target}, 2, rng).value();
  std::fill(m.params().begin(), m.params().end(), 0.0);
  if (m.numerical_target()) return m;
  const size_t beta = m.head_offset() + probs.size() * 2;
  for (size_t v = 0; v < probs.size(); ++v) {
    m.params()[beta + v] = std::log(probs[v]);
  }
  return m;
}

// Histogram for the first attribute, fixed sub-models for the rest.
inline ProbModel FixedModel(const Schema& schema,
                            const std::vector<std::vector<double>>& probs) {
  ProbModel model;
  model.schema = schema;
  for (size_t a = 0; a < schema.size(); ++a) model.sequence.order.push_back(a);
  model.units = model.sequence.Units();
  model.histograms.resize(schema.size());
  model.submodels.resize(schema.size());
  model.histograms[0] = NoisyHistogram{{0}, probs[0], probs[0]};
  for (size_t a = 1; a < schema.size(); ++a) {
    std::vector<size_t> context(a);
    std::iota(context.begin(), context.end(), 0);
    model.submodels[a] = FixedSubModel(schema, context, a, probs[a]);
  }
  return model;
}

}  // namespace kamino::testing

#endif  // KAMINO_TESTS_TEST_UTIL_H_
