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

#include "kamino/weight_learner.h"

#include <cmath>
#include <limits>

#include "gtest/gtest.h"
#include "kamino/status.h"
#include "test_util.h"

namespace kamino {
namespace {

using ::kamino::testing::OracleViolations;
using ::kamino::testing::RandomDataset;
using ::kamino::testing::RandomDcText;
using ::kamino::testing::RandomSchema;

Schema Binary() {
  return Schema::Create({AttributeSpec::Categorical("a", {"x", "y"}),
                         AttributeSpec::Categorical("b", {"x", "y"})})
      .value();
}

std::vector<DenialConstraint> UnaryAndFd(const Schema& schema) {
  return {ParseDc("soft !(t1.a == y & t1.b == y)", schema, "u").value(),
          ParseDc("soft !(t1.a == t2.a & t1.b != t2.b)", schema, "f").value()};
}

// Per-tuple violation tallies from the exhaustive pair oracle.
std::vector<std::vector<double>> OracleMatrix(
    const Dataset& data, const std::vector<DenialConstraint>& dcs) {
  std::vector<std::vector<double>> v(data.num_rows(),
                                     std::vector<double>(dcs.size(), 0.0));
  for (size_t l = 0; l < dcs.size(); ++l) {
    for (const auto& [i, j] : OracleViolations(dcs[l], data)) {
      v[i - 1][l] += 1;
      if (j != i) v[j - 1][l] += 1;
    }
  }
  return v;
}

double L2Distance(const std::vector<std::vector<double>>& x,
                  const std::vector<std::vector<double>>& y) {
  double sq = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    for (size_t l = 0; l < x[i].size(); ++l) {
      sq += (x[i][l] - y[i][l]) * (x[i][l] - y[i][l]);
    }
  }
  return std::sqrt(sq);
}

Dataset FromTuples(const Schema& schema, const std::vector<int>& codes) {
  std::vector<std::vector<double>> cols(2);
  for (int c : codes) {
    cols[0].push_back(c / 2);
    cols[1].push_back(c % 2);
  }
  return Dataset::FromColumns(schema, cols).value();
}

TEST(SensitivityTest, MatchesClosedForm) {
  const Schema schema = Binary();
  const auto dcs = UnaryAndFd(schema);
  EXPECT_NEAR(Sensitivity(dcs, 100).value(), 1.0 + std::sqrt(9900.0), 1e-9);
  EXPECT_EQ(Sensitivity(std::span(dcs).first(1), 100).value(), 1.0);
  EXPECT_EQ(Sensitivity(std::span(dcs).first(1), 7).value(), 1.0);
}

TEST(SensitivityTest, RejectsHigherArity) {
  const Schema schema = Binary();
  auto dcs = UnaryAndFd(schema);
  dcs[1].arity = 3;
  EXPECT_TRUE(HasErrorKind(Sensitivity(dcs, 10).status(),
                           ErrorKind::kUnsupportedArity));
}

TEST(SensitivityTest, ExhaustiveNeighborsStayWithinBound) {
  const Schema schema = Binary();
  const auto dcs = UnaryAndFd(schema);
  for (size_t L = 3; L <= 6; ++L) {
    const double bound = Sensitivity(dcs, L).value();
    double observed = 0.0;
    size_t instances = 1;
    for (size_t i = 0; i < L; ++i) instances *= 4;
    for (size_t code = 0; code < instances; ++code) {
      std::vector<int> tuples(L);
      for (size_t i = 0, c = code; i < L; ++i, c /= 4) tuples[i] = c % 4;
      const auto base = OracleMatrix(FromTuples(schema, tuples), dcs);
      for (size_t pos = 0; pos < L; ++pos) {
        // Substitute tuple `pos`.
        for (int alt = 0; alt < 4; ++alt) {
          if (alt == tuples[pos]) continue;
          std::vector<int> other = tuples;
          other[pos] = alt;
          const auto m = OracleMatrix(FromTuples(schema, other), dcs);
          observed = std::max(observed, L2Distance(base, m));
        }
        // Remove tuple `pos`; its row reads as zero.
        std::vector<int> fewer = tuples;
        fewer.erase(fewer.begin() + pos);
        auto m = OracleMatrix(FromTuples(schema, fewer), dcs);
        m.insert(m.begin() + pos, std::vector<double>(dcs.size(), 0.0));
        observed = std::max(observed, L2Distance(base, m));
      }
    }
    EXPECT_LE(observed, bound + 1e-12) << "L=" << L;
    EXPECT_GT(observed, 0.0);
  }
}

TEST(ViolationMatrixTest, MatchesPairOracle) {
  RandomSource rng(5, "matrix");
  for (int trial = 0; trial < 100; ++trial) {
    const Schema schema = RandomSchema(rng, 3);
    const Dataset data = RandomDataset(rng, schema, 2 + rng.UniformIndex(15));
    std::vector<DenialConstraint> dcs;
    dcs.push_back(ParseDc(RandomDcText(rng, schema, 1), schema, "u").value());
    dcs.push_back(ParseDc(RandomDcText(rng, schema, 2), schema, "b").value());
    EXPECT_EQ(ExactViolationMatrix(data, dcs), OracleMatrix(data, dcs));
  }
}

TEST(ViolationMatrixTest, HandCountedSample) {
  const Schema schema = Binary();
  const auto dcs = UnaryAndFd(schema);
  // Tuple 1 = (x, x) conflicts with (x, y) twice under the FD.
  const Dataset data = FromTuples(schema, {0, 1, 1});
  const auto v = ExactViolationMatrix(data, std::span(dcs).subspan(1));
  EXPECT_EQ(v[0][0], 2);
  EXPECT_EQ(v[1][0], 1);
  EXPECT_EQ(v[2][0], 1);
}

TEST(ViolationMatrixTest, NoiselessCleanSampleIsZero) {
  RandomSource rng(3, "clean");
  const Schema schema = Binary();
  const auto dcs = UnaryAndFd(schema);
  const Dataset data = FromTuples(schema, std::vector<int>(300, 0));
  const ViolationMatrix m = BuildNoisyMatrix(data, dcs, 50, 0.0, 1.0, rng);
  for (const auto& row : m.values) {
    for (double x : row) EXPECT_EQ(x, 0.0);
  }
}

TEST(ViolationMatrixTest, SampleSizeConcentratesAtTarget) {
  const Schema schema = Binary();
  const auto dcs = UnaryAndFd(schema);
  RandomSource data_rng(9, "rows");
  std::vector<int> codes;
  for (int i = 0; i < 2000; ++i) codes.push_back(data_rng.UniformIndex(4));
  const Dataset data = FromTuples(schema, codes);
  const size_t L = 100;
  for (int s = 0; s < 40; ++s) {
    RandomSource rng(s, "sample");
    const ViolationMatrix m = BuildNoisyMatrix(data, dcs, L, 1.0, 5.0, rng);
    EXPECT_LE(m.rows.size(), L);
    EXPECT_GE(m.rows.size(), L - 3 * std::sqrt(double(L)));
    EXPECT_TRUE(std::is_sorted(m.rows.begin(), m.rows.end()));
    for (const auto& row : m.values) {
      for (double x : row) EXPECT_GE(x, 0.0);
    }
  }
}

SchemaSequence Order(std::vector<size_t> order) {
  SchemaSequence s;
  s.order = std::move(order);
  return s;
}

ViolationMatrix Matrix(std::vector<std::vector<double>> values) {
  ViolationMatrix m;
  for (size_t i = 0; i < values.size(); ++i) m.rows.push_back(i);
  m.values = std::move(values);
  return m;
}

TEST(LearnWeightsTest, ZeroMatrixKeepsMaximum) {
  const Schema schema = Binary();
  const auto dcs = UnaryAndFd(schema);
  RandomSource rng(1, "zero");
  const auto w = LearnWeights(Matrix(std::vector<std::vector<double>>(
                                  20, std::vector<double>(2, 0.0))),
                              dcs, Order({0, 1}), 2, WeightOptions{}, rng)
                     .value();
  EXPECT_EQ(w, (std::vector<double>{10.0, 10.0}));
}

TEST(LearnWeightsTest, ViolatedConstraintEndsLower) {
  const Schema schema = Binary();
  const auto dcs = UnaryAndFd(schema);
  std::vector<std::vector<double>> v(20, {0.0, 0.0});
  for (auto& row : v) row[1] = 1.5;
  RandomSource rng(2, "lower");
  const auto w =
      LearnWeights(Matrix(v), dcs, Order({0, 1}), 2, WeightOptions{}, rng)
          .value();
  EXPECT_LT(w[1], w[0]);
  EXPECT_EQ(w[0], 10.0);
}

TEST(LearnWeightsTest, HeavyCountsSaturateAtMaximum) {
  const Schema schema = Binary();
  const auto dcs = UnaryAndFd(schema);
  std::vector<std::vector<double>> v(20, {0.0, 40.0});
  RandomSource rng(2, "saturate");
  const auto w =
      LearnWeights(Matrix(v), dcs, Order({0, 1}), 2, WeightOptions{}, rng)
          .value();
  // exp(-400) scales the step below the spacing of doubles near 10.
  EXPECT_EQ(w[1], 10.0);
}

TEST(LearnWeightsTest, WeightsNeverLeaveRange) {
  const Schema schema = Binary();
  const auto dcs = UnaryAndFd(schema);
  RandomSource rng(4, "clamp");
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> v(10, std::vector<double>(2));
    for (auto& row : v) {
      for (double& x : row) x = rng.Bernoulli(0.5) ? 0.0 : rng.Uniform(0, 50);
    }
    WeightOptions options;
    options.iterations = 50;
    options.batch_size = 3;
    options.learning_rate = rng.Uniform(0.01, 2.0);
    const auto w =
        LearnWeights(Matrix(v), dcs, Order({1, 0}), 2, options, rng).value();
    for (double x : w) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, options.w_max);
    }
  }
}

TEST(LearnWeightsTest, LargerViolationsNeverRaiseWeights) {
  const Schema schema = Binary();
  const auto dcs = UnaryAndFd(schema);
  RandomSource rng(8, "monotone");
  int counterexamples = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<double>> v(12, std::vector<double>(2));
    for (auto& row : v) {
      for (double& x : row) x = rng.Bernoulli(0.6) ? 0.0 : rng.Uniform(0, 3);
    }
    auto more = v;
    for (auto& row : more) {
      for (double& x : row) x += rng.Bernoulli(0.3) ? rng.Uniform(0, 5) : 0.0;
    }
    WeightOptions options;
    options.iterations = 30;
    options.batch_size = 2;
    RandomSource a(trial, "run"), b(trial, "run");
    const auto w1 =
        LearnWeights(Matrix(v), dcs, Order({0, 1}), 2, options, a).value();
    const auto w2 =
        LearnWeights(Matrix(more), dcs, Order({0, 1}), 2, options, b).value();
    for (size_t l = 0; l < w1.size(); ++l)
      counterexamples += w2[l] > w1[l] + 1e-12;
  }
  EXPECT_EQ(counterexamples, 0);
}

TEST(LearnWeightsTest, ResolvesHardGivenAndLearned) {
  const Schema schema = Binary();
  std::vector<DenialConstraint> dcs = {
      ParseDc("hard !(t1.a == y)", schema, "h").value(),
      ParseDc("soft(1.5) !(t1.b == y)", schema, "g").value(),
      ParseDc("soft !(t1.a == t2.a & t1.b != t2.b)", schema, "l").value()};
  EXPECT_EQ(LearnableConstraints(dcs), std::vector<size_t>{2});
  const std::vector<double> learned = {0.25};
  const auto w = ResolveWeights(dcs, learned);
  EXPECT_TRUE(std::isinf(w[0]));
  EXPECT_EQ(w[1], 1.5);
  EXPECT_EQ(w[2], 0.25);
}

}  // namespace
}  // namespace kamino
