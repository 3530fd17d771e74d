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

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "kamino/dataset.h"
#include "kamino/denial_constraint.h"
#include "kamino/status.h"
#include "kamino/violations.h"
#include "test_util.h"

namespace kamino {
namespace {

using ::kamino::testing::OracleViolations;
using ::kamino::testing::RandomDataset;
using ::kamino::testing::RandomDcText;
using ::kamino::testing::RandomSchema;

// age, edu_num, edu, cap_gain, cap_loss.
Schema CensusSchema() {
  return Schema::Create({AttributeSpec::Numerical("age", 0, 100, 10),
                         AttributeSpec::Numerical("edu_num", 1, 16, 16),
                         AttributeSpec::Categorical(
                             "edu", {"Bachelors", "HS-grad", "Some-college"}),
                         AttributeSpec::Numerical("cap_gain", 0, 2e6, 10),
                         AttributeSpec::Numerical("cap_loss", 0, 5000, 10)})
      .value();
}

constexpr char kPhi1[] = "hard !(t1.edu==t2.edu & t1.edu_num!=t2.edu_num)";
constexpr char kPhi2[] =
    "hard !(t1.cap_gain > t2.cap_gain & t1.cap_loss < t2.cap_loss)";
constexpr char kPhi3[] = "hard !(t1.age<10 & t1.cap_gain>1000000)";

Dataset Rows(const Schema& schema, std::vector<std::vector<double>> rows) {
  Dataset data(schema);
  for (const auto& r : rows) EXPECT_TRUE(data.AppendRow(r).ok());
  return data;
}

TEST(ParseDcTest, FunctionalDependencyIsBinaryHard) {
  const Schema schema = CensusSchema();
  auto dc = ParseDc(kPhi1, schema);
  ASSERT_TRUE(dc.ok()) << dc.status();
  EXPECT_EQ(dc->arity, 2);
  EXPECT_TRUE(dc->hard);
  EXPECT_TRUE(std::isinf(dc->weight));
  ASSERT_EQ(dc->predicates.size(), 2u);
  EXPECT_EQ(dc->predicates[0].op, CompareOp::kEq);
  EXPECT_EQ(dc->predicates[1].op, CompareOp::kNe);
  EXPECT_EQ(dc->Attributes(), (std::vector<size_t>{1, 2}));
}

TEST(ParseDcTest, UnaryConstraint) {
  auto dc = ParseDc(kPhi3, CensusSchema());
  ASSERT_TRUE(dc.ok()) << dc.status();
  EXPECT_EQ(dc->arity, 1);
  EXPECT_TRUE(dc->predicates[0].rhs_constant);
  EXPECT_EQ(dc->predicates[1].constant, 1e6);
}

TEST(ParseDcTest, Errors) {
  const Schema schema = CensusSchema();
  EXPECT_TRUE(HasErrorKind(ParseDc("!(t1.age == t2.b)", schema).status(),
                           ErrorKind::kUnknownAttribute));
  EXPECT_TRUE(HasErrorKind(ParseDc("!(t1.edu < t2.edu)", schema).status(),
                           ErrorKind::kTypeMismatch));
  EXPECT_TRUE(HasErrorKind(ParseDc("!(t1.age == t2.edu)", schema).status(),
                           ErrorKind::kTypeMismatch));
  EXPECT_TRUE(HasErrorKind(ParseDc("!(t1.age == young)", schema).status(),
                           ErrorKind::kTypeMismatch));
  EXPECT_TRUE(HasErrorKind(ParseDc("!(t1.edu == PhD)", schema).status(),
                           ErrorKind::kDomainViolation));
  EXPECT_TRUE(HasErrorKind(ParseDc("(t1.age == t2.age)", schema).status(),
                           ErrorKind::kSyntaxError));
  EXPECT_TRUE(
      HasErrorKind(ParseDc("maybe !(t1.age == t2.age)", schema).status(),
                   ErrorKind::kSyntaxError));
  EXPECT_TRUE(HasErrorKind(ParseDc("!(t1.age t2.age)", schema).status(),
                           ErrorKind::kSyntaxError));
  EXPECT_TRUE(HasErrorKind(ParseDc("!(t1.age == t2.age &)", schema).status(),
                           ErrorKind::kSyntaxError));
  EXPECT_TRUE(HasErrorKind(ParseDc("!(age == 3)", schema).status(),
                           ErrorKind::kSyntaxError));
}

TEST(ParseDcTest, SoftWeightsIdsAndSpellings) {
  const Schema schema = CensusSchema();
  auto learned =
      ParseDc("soft !(t1.age = t2.age ∧ t1.cap_gain ≠ t2.cap_gain)", schema);
  ASSERT_TRUE(learned.ok()) << learned.status();
  EXPECT_FALSE(learned->hard);
  EXPECT_FALSE(learned->has_weight());
  EXPECT_EQ(learned->predicates[1].op, CompareOp::kNe);

  auto fixed = ParseDc(
      "phi9: soft(0.69) !(t1.edu == 'HS-grad' && t1.age >= 90)", schema);
  ASSERT_TRUE(fixed.ok()) << fixed.status();
  EXPECT_EQ(fixed->id, "phi9");
  EXPECT_DOUBLE_EQ(fixed->weight, 0.69);
  EXPECT_EQ(fixed->predicates[0].constant, 1.0);
  EXPECT_EQ(fixed->predicates[1].op, CompareOp::kGe);

  auto again = ParseDc(FormatDc(*fixed, schema), schema);
  ASSERT_TRUE(again.ok()) << again.status();
  EXPECT_EQ(FormatDc(*again, schema), FormatDc(*fixed, schema));
}

TEST(ParseDcTest, FileTextSkipsCommentsAndBlankLines) {
  const std::string text = std::string("# census rules\n\n") + kPhi1 +
                           "  # fd\n" + kPhi2 + "\n\nphi3: " + kPhi3 + "\n";
  auto dcs = ParseDcText(text, CensusSchema());
  ASSERT_TRUE(dcs.ok()) << dcs.status();
  ASSERT_EQ(dcs->size(), 3u);
  EXPECT_EQ((*dcs)[0].id, "dc1");
  EXPECT_EQ((*dcs)[1].id, "dc2");
  EXPECT_EQ((*dcs)[2].id, "phi3");
  auto bad =
      ParseDcText(std::string(kPhi1) + "\n!(t1.zz == t2.zz)\n", CensusSchema());
  EXPECT_TRUE(HasErrorKind(bad.status(), ErrorKind::kUnknownAttribute));
  EXPECT_NE(bad.status().message().find("line 2"), std::string::npos);
}

TEST(CountViolationsTest, DefinitionCases) {
  const Schema schema = CensusSchema();
  const DenialConstraint phi1 = ParseDc(kPhi1, schema).value();
  const Dataset two = Rows(schema, {{30, 9, 1, 0, 0}, {40, 10, 1, 0, 0}});
  const ViolationSet v = CountViolations(phi1, two);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.pairs[0], std::make_pair(size_t{1}, size_t{2}));

  const Dataset same = Rows(schema, {{30, 9, 1, 0, 0}, {30, 9, 1, 0, 0}});
  EXPECT_EQ(CountViolations(phi1, same).size(), 0u);

  // An asymmetric constraint violated in one orientation counts once.
  const DenialConstraint phi2 = ParseDc(kPhi2, schema).value();
  const Dataset order = Rows(schema, {{30, 9, 1, 100, 0}, {30, 9, 1, 50, 10}});
  EXPECT_EQ(CountViolations(phi2, order).size(), 1u);

  const DenialConstraint phi3 = ParseDc(kPhi3, schema).value();
  const Dataset kids = Rows(
      schema, {{5, 1, 1, 1.5e6, 0}, {50, 1, 1, 1.5e6, 0}, {5, 1, 1, 0, 0}});
  const ViolationSet u = CountViolations(phi3, kids);
  EXPECT_EQ(u.tuples, (std::vector<size_t>{1}));
}

TEST(CountViolationsTest, MatchesExhaustiveOracle) {
  RandomSource rng(2024, "count-oracle");
  for (int trial = 0; trial < 300; ++trial) {
    const Schema schema = RandomSchema(rng, 3);
    const Dataset data = RandomDataset(rng, schema, 20);
    const int arity = trial % 4 == 0 ? 1 : 2;
    const DenialConstraint dc =
        ParseDc(RandomDcText(rng, schema, arity), schema).value();
    const auto oracle = OracleViolations(dc, data);
    const ViolationSet got = CountViolations(dc, data);
    ASSERT_EQ(got.size(), oracle.size()) << dc.text;
    EXPECT_EQ(CountViolationsSize(dc, data), oracle.size());
    std::set<std::pair<size_t, size_t>> members;
    if (dc.arity == 1) {
      for (size_t t : got.tuples) members.insert({t, t});
    } else {
      members.insert(got.pairs.begin(), got.pairs.end());
    }
    EXPECT_EQ(members, oracle) << dc.text;
  }
}

TEST(CountViolationsTest, MonotoneUnderAddingTuples) {
  RandomSource rng(77, "monotone");
  for (int trial = 0; trial < 100; ++trial) {
    const Schema schema = RandomSchema(rng, 4);
    const Dataset data = RandomDataset(rng, schema, 25);
    const DenialConstraint dc =
        ParseDc(RandomDcText(rng, schema, 1 + trial % 2), schema).value();
    const ViolationSet full = CountViolations(dc, data);
    const size_t cut = 1 + rng.UniformIndex(24);
    const ViolationSet part = CountViolations(dc, data.Prefix(cut));
    for (const auto& p : part.pairs) {
      EXPECT_TRUE(std::binary_search(full.pairs.begin(), full.pairs.end(), p));
    }
    for (size_t t : part.tuples) {
      EXPECT_NE(std::find(full.tuples.begin(), full.tuples.end(), t),
                full.tuples.end());
    }
  }
}

TEST(IncrementalViolationsTest, EmptyPrefixIsZero) {
  const Schema schema = CensusSchema();
  const DenialConstraint phi1 = ParseDc(kPhi1, schema).value();
  const std::vector<double> t = {30, 9, 1, 0, 0};
  EXPECT_EQ(IncrementalViolations(phi1, t, Dataset(schema)), 0u);
}

TEST(IncrementalViolationsTest, HandEnumeratedPrefix) {
  const Schema schema = CensusSchema();
  const DenialConstraint phi1 = ParseDc(kPhi1, schema).value();
  const Dataset prefix =
      Rows(schema, {{30, 9, 1, 0, 0}, {31, 9, 1, 0, 0}, {32, 13, 0, 0, 0}});
  ASSERT_EQ(CountViolations(phi1, prefix).size(), 0u);
  const std::vector<double> t = {33, 10, 1, 0, 0};
  EXPECT_EQ(IncrementalViolations(phi1, t, prefix), 2u);
}

TEST(IncrementalViolationsTest, SumEqualsPairwiseCount) {
  RandomSource rng(3, "eq3");
  for (int trial = 0; trial < 200; ++trial) {
    const Schema schema = RandomSchema(rng, 2 + rng.UniformIndex(3));
    const size_t n = 1 + rng.UniformIndex(30);
    const Dataset data = RandomDataset(rng, schema, n);
    const DenialConstraint dc =
        ParseDc(RandomDcText(rng, schema, 1 + trial % 2), schema).value();
    size_t sum = 0;
    for (size_t i = 0; i < n; ++i) {
      sum += IncrementalViolations(dc, data.Row(i), data.Prefix(i));
    }
    EXPECT_EQ(sum, OracleViolations(dc, data).size()) << dc.text;
  }
}

TEST(PartialViolationsTest, RequiresCoverage) {
  const Schema schema = CensusSchema();
  const DenialConstraint phi1 = ParseDc(kPhi1, schema).value();
  const std::vector<size_t> only_edu = {2};
  const std::vector<double> t = {0, 0, 0, 0, 0};
  EXPECT_TRUE(HasErrorKind(
      PartialViolations(phi1, only_edu, t, Dataset(schema)).status(),
      ErrorKind::kInsufficientAttributes));
}

TEST(PartialViolationsTest, SamplingIllustration) {
  // t1 = (age 39, edu_num 13, edu Bachelors) is already placed and t2 has
  // age 50, edu_num 13. Under the dependency edu_num -> edu every edu value
  // other than Bachelors violates against t1. Under edu -> edu_num alone a
  // different edu label is consistent with t1.
  const Schema schema = CensusSchema();
  const DenialConstraint phi1 = ParseDc(kPhi1, schema).value();
  const DenialConstraint reverse =
      ParseDc("hard !(t1.edu_num == t2.edu_num & t1.edu != t2.edu)", schema)
          .value();
  const std::vector<size_t> assigned = {0, 1, 2};
  const Dataset prefix = Rows(schema, {{39, 13, 0, 0, 0}});
  for (double edu : {0.0, 1.0, 2.0}) {
    const std::vector<double> t2 = {50, 13, edu, 0, 0};
    EXPECT_EQ(*PartialViolations(reverse, assigned, t2, prefix),
              edu == 0.0 ? 0u : 1u);
    EXPECT_EQ(*PartialViolations(phi1, assigned, t2, prefix), 0u);
  }
  const std::vector<double> clash = {50, 12, 0, 0, 0};
  EXPECT_EQ(*PartialViolations(phi1, assigned, clash, prefix), 1u);
}

TEST(PartialViolationsTest, ProjectionMatchesFullCount) {
  RandomSource rng(5, "projection");
  for (int trial = 0; trial < 200; ++trial) {
    const Schema schema = RandomSchema(rng, 4);
    const Dataset data = RandomDataset(rng, schema, 12);
    const DenialConstraint dc =
        ParseDc(RandomDcText(rng, schema, 1 + trial % 2), schema).value();
    std::vector<size_t> assigned = dc.Attributes();
    for (size_t a = 0; a < schema.size(); ++a) {
      if (rng.Bernoulli(0.5) &&
          std::find(assigned.begin(), assigned.end(), a) == assigned.end()) {
        assigned.push_back(a);
      }
    }
    const size_t i = rng.UniformIndex(12);
    EXPECT_EQ(*PartialViolations(dc, assigned, data.Row(i), data.Prefix(i)),
              IncrementalViolations(dc, data.Row(i), data.Prefix(i)));
  }
}

TEST(PartitionBySequenceTest, LastCoveredAttribute) {
  const Schema schema = CensusSchema();
  const std::vector<DenialConstraint> dcs = {ParseDc(kPhi1, schema).value(),
                                             ParseDc(kPhi3, schema).value()};
  const std::vector<size_t> order = {0, 1, 2, 3, 4};
  auto partition = PartitionBySequence(dcs, order, schema.size());
  ASSERT_TRUE(partition.ok());
  EXPECT_EQ((*partition)[2], (std::vector<size_t>{0}));  // edu
  EXPECT_EQ((*partition)[3], (std::vector<size_t>{1}));  // cap_gain
  EXPECT_TRUE((*partition)[0].empty());

  auto none = PartitionBySequence({}, order, schema.size());
  for (const auto& list : *none) EXPECT_TRUE(list.empty());

  const std::vector<size_t> missing = {0, 1};
  EXPECT_TRUE(
      HasErrorKind(PartitionBySequence(dcs, missing, schema.size()).status(),
                   ErrorKind::kInvalidOrder));
}

TEST(PartitionBySequenceTest, EachConstraintExactlyOnce) {
  RandomSource rng(8, "partition");
  for (int trial = 0; trial < 100; ++trial) {
    const Schema schema = RandomSchema(rng, 5);
    std::vector<DenialConstraint> dcs;
    for (int d = 0; d < 6; ++d) {
      dcs.push_back(
          ParseDc(RandomDcText(rng, schema, 1 + d % 2), schema).value());
    }
    std::vector<size_t> order = {0, 1, 2, 3, 4};
    std::shuffle(order.begin(), order.end(), rng.engine());
    const auto partition = PartitionBySequence(dcs, order, 5).value();
    std::vector<int> seen(dcs.size());
    for (size_t pos = 0; pos < 5; ++pos) {
      for (size_t d : partition[order[pos]]) {
        ++seen[d];
        // Covered by the first pos+1 attributes, not by the first pos.
        const std::vector<size_t> attrs = dcs[d].Attributes();
        for (size_t a : attrs) {
          EXPECT_LE(std::find(order.begin(), order.end(), a) - order.begin(),
                    static_cast<long>(pos));
        }
        EXPECT_NE(std::find(attrs.begin(), attrs.end(), order[pos]),
                  attrs.end());
      }
    }
    for (int s : seen) EXPECT_EQ(s, 1);
  }
}

TEST(ExtractFdsTest, Shapes) {
  const Schema census = CensusSchema();
  const std::vector<DenialConstraint> dcs = {ParseDc(kPhi1, census).value(),
                                             ParseDc(kPhi2, census).value(),
                                             ParseDc(kPhi3, census).value()};
  const auto fds = ExtractFds(dcs);
  ASSERT_EQ(fds.size(), 1u);
  EXPECT_EQ(fds[0].lhs, (std::vector<size_t>{2}));
  EXPECT_EQ(fds[0].rhs, 1u);
  EXPECT_EQ(fds[0].dc_index, 0u);

  const Schema tax =
      Schema::Create({AttributeSpec::Categorical("state", {"CA", "NY"}),
                      AttributeSpec::Categorical("has_child", {"Y", "N"}),
                      AttributeSpec::Numerical("child_exemp", 0, 5000, 10)})
          .value();
  const DenialConstraint phi4 =
      ParseDc(
          "hard !(t1.state == t2.state & t1.has_child == t2.has_child & "
          "t1.child_exemp != t2.child_exemp)",
          tax)
          .value();
  auto fd = AsFd(phi4);
  ASSERT_TRUE(fd.has_value());
  EXPECT_EQ(fd->lhs, (std::vector<size_t>{0, 1}));
  EXPECT_EQ(fd->rhs, 2u);

  EXPECT_FALSE(AsFd(ParseDc("hard !(t1.state == t2.state & t1.child_exemp > "
                            "t2.child_exemp)",
                            tax)
                        .value()));
  EXPECT_FALSE(AsFd(ParseDc("hard !(t1.state != t2.state & t1.has_child != "
                            "t2.has_child)",
                            tax)
                        .value()));
}

}  // namespace
}  // namespace kamino
