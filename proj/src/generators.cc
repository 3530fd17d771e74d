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

#include "kamino/generators.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "kamino/random.h"

namespace kamino {
namespace {

const std::vector<std::string>& EducationLevels() {
  static const auto* levels = new std::vector<std::string>{
      "Preschool", "1st-4th",      "5th-6th",     "7th-8th",
      "9th",       "10th",         "11th",        "12th",
      "HS-grad",   "Some-college", "Assoc-voc",   "Assoc-acdm",
      "Bachelors", "Masters",      "Prof-school", "Doctorate"};
  return *levels;
}

std::vector<std::string> Levels(size_t count) {
  std::vector<std::string> out;
  for (size_t i = 0; i < count; ++i) out.push_back("L" + std::to_string(i));
  return out;
}

std::vector<std::string> Codes(size_t count) {
  std::vector<std::string> out;
  for (size_t i = 0; i < count; ++i) out.push_back("R" + std::to_string(i));
  return out;
}

}  // namespace

GeneratedData GenerateAdultLike(size_t n, uint64_t seed) {
  const Schema schema =
      Schema::Create(
          {AttributeSpec::Numerical("age", 17, 90, 8),
           AttributeSpec::Categorical(
               "workclass",
               {"Private", "Self-emp", "Government", "Unemployed"}),
           AttributeSpec::Categorical("edu", EducationLevels()),
           AttributeSpec::Numerical("edu_num", 1, 16, 16),
           AttributeSpec::Categorical(
               "marital", {"Never-married", "Married", "Divorced", "Widowed"}),
           AttributeSpec::Categorical("sex", {"Male", "Female"}),
           AttributeSpec::Categorical("cap_gain",
                                      {"0", "1-3k", "3k-7k", "7k-15k", "15k+"},
                                      /*ordered=*/true),
           AttributeSpec::Categorical("cap_loss",
                                      {"0", "1-1.5k", "1.5k-2k", "2k+"},
                                      /*ordered=*/true)})
          .value();
  RandomSource rng(seed, "adult");
  static const double kEduWeights[16] = {0.2, 0.5, 1, 2,   1.5,  3,   3.5, 1.3,
                                         32,  22,  4, 3.3, 16.4, 5.3, 1.8, 1.2};
  // Loss levels allowed per gain level; consecutive ranges only touch at
  // their ends, so gain and loss never order oppositely.
  static const int kLossLo[5] = {0, 0, 0, 1, 2};
  static const int kLossHi[5] = {0, 0, 1, 2, 3};
  std::vector<std::vector<double>> cols(8);
  for (size_t r = 0; r < n; ++r) {
    const double age = std::clamp(std::round(rng.Normal(38, 13)), 17.0, 90.0);
    const size_t edu = rng.Categorical(kEduWeights);
    const double schooling = edu / 15.0;
    const double older = (age - 17) / 73.0;
    const double work[4] = {0.7, 0.08 + 0.15 * older, 0.12 + 0.1 * schooling,
                            age > 65 ? 0.3 : 0.04};
    const double mar[4] = {std::max(0.05, 0.7 - 1.5 * older), 0.2 + older,
                           0.05 + 0.3 * older, age > 60 ? 0.25 : 0.01};
    const size_t sex = rng.Bernoulli(0.33);
    const double gain_weights[5] = {
        0.9 - 0.25 * schooling, 0.04, 0.03 + 0.05 * schooling,
        0.02 + 0.05 * schooling, 0.01 + 0.05 * schooling};
    const size_t gain = rng.Categorical(gain_weights);
    const int loss =
        kLossLo[gain] +
        static_cast<int>(rng.UniformIndex(kLossHi[gain] - kLossLo[gain] + 1));
    cols[0].push_back(age);
    cols[1].push_back(rng.Categorical(work));
    cols[2].push_back(edu);
    cols[3].push_back(edu + 1.0);
    cols[4].push_back(rng.Categorical(mar));
    cols[5].push_back(sex);
    cols[6].push_back(gain);
    cols[7].push_back(loss);
  }
  GeneratedData out{
      schema, Dataset::FromColumns(schema, std::move(cols)).value(),
      "phi1: hard !(t1.edu == t2.edu & t1.edu_num != t2.edu_num)\n"
      "phi2: hard !(t1.cap_gain > t2.cap_gain & "
      "t1.cap_loss < t2.cap_loss)\n"};
  return out;
}

GeneratedData GenerateSurveyLike(size_t n, uint64_t seed) {
  const Schema schema =
      Schema::Create({AttributeSpec::Categorical("a1", {"no", "yes"}),
                      AttributeSpec::Categorical("a2", {"no", "yes"}),
                      AttributeSpec::Categorical("a3", Levels(4), true),
                      AttributeSpec::Categorical("a4", {"no", "yes"}),
                      AttributeSpec::Categorical("a5", Levels(5), true),
                      AttributeSpec::Categorical("a11", Levels(4), true),
                      AttributeSpec::Categorical("a12", Codes(7)),
                      AttributeSpec::Categorical("a13", Levels(6), true)})
          .value();
  RandomSource rng(seed, "survey");
  static const double kLevelWeights[3] = {0.4, 0.35, 0.25};
  constexpr double kCorruption = 0.015;
  std::vector<std::vector<double>> cols(8);
  for (size_t r = 0; r < n; ++r) {
    // Each level is a block: a5 and a13 ranges of higher blocks lie strictly
    // above lower ones, a12 is the block's region code, and a3 == a11.
    const int level = static_cast<int>(rng.Categorical(kLevelWeights));
    int a11 = level == 2 ? 2 + static_cast<int>(rng.Bernoulli(0.5)) : level;
    int a3 = a11;
    int a5 = level == 2 ? 4 : 2 * level + static_cast<int>(rng.Bernoulli(0.5));
    int a13 = 2 * level + static_cast<int>(rng.Bernoulli(0.5));
    int a12 = level;
    if (rng.Bernoulli(kCorruption)) {
      switch (rng.UniformIndex(4)) {
        case 0:
          a3 = static_cast<int>(rng.UniformIndex(4));
          break;
        case 1:
          a5 = static_cast<int>(rng.UniformIndex(5));
          break;
        case 2:
          a13 = static_cast<int>(rng.UniformIndex(6));
          break;
        default:
          a12 = static_cast<int>(rng.UniformIndex(7));
          break;
      }
    }
    cols[0].push_back(rng.Bernoulli(0.3 + 0.2 * level));
    cols[1].push_back(rng.Bernoulli(0.6 - 0.15 * level));
    cols[2].push_back(a3);
    cols[3].push_back(rng.Bernoulli(level == 2 ? 0.7 : 0.2));
    cols[4].push_back(a5);
    cols[5].push_back(a11);
    cols[6].push_back(a12);
    cols[7].push_back(a13);
  }
  GeneratedData out{
      schema, Dataset::FromColumns(schema, std::move(cols)).value(),
      "phi1: soft !(t1.a13 == t2.a13 & t1.a11 < t2.a11 & t1.a3 > t2.a3)\n"
      "phi2: soft !(t1.a12 != t2.a12 & t1.a13 <= t2.a13 & t1.a5 >= t2.a5)\n"
      "phi3: soft !(t1.a5 <= t2.a5 & t1.a3 > t2.a3 & t1.a12 != t2.a12 & "
      "t1.a11 > t2.a11)\n"};
  return out;
}

}  // namespace kamino
