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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "kamino/accountant.h"
#include "kamino/denial_constraint.h"
#include "kamino/evaluator.h"
#include "kamino/generators.h"
#include "kamino/status.h"
#include "kamino/violations.h"
#include "nlohmann/json.hpp"

namespace kamino {
namespace {

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path TempDir(const std::string& name) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / ("kamino_pipeline_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

double StageCount(const BudgetReport& report, const std::string& name) {
  for (const StageCost& s : report.stages) {
    if (s.name == name) return s.multiplier;
  }
  return -1.0;
}

TEST(GeneratorsTest, AdultLikeTruthSatisfiesHardConstraints) {
  const GeneratedData g = GenerateAdultLike(2000, 7);
  const auto dcs = ParseDcText(g.dc_text, g.schema).value();
  ASSERT_EQ(dcs.size(), 2u);
  for (const DenialConstraint& dc : dcs) {
    EXPECT_TRUE(dc.hard);
    EXPECT_EQ(CountViolationsSize(dc, g.data), 0u) << dc.id;
  }
}

TEST(GeneratorsTest, SurveyLikeTruthHasRareViolations) {
  const GeneratedData g = GenerateSurveyLike(2000, 7);
  const auto dcs = ParseDcText(g.dc_text, g.schema).value();
  ASSERT_EQ(dcs.size(), 3u);
  double total = 0.0;
  for (const DenialConstraint& dc : dcs) {
    EXPECT_FALSE(dc.hard);
    EXPECT_FALSE(dc.has_weight());
    const double pct = ViolationPercentage(dc, g.data);
    EXPECT_LT(pct, 2.0) << dc.id;
    total += pct;
  }
  EXPECT_GT(total, 0.0);
}

TEST(GeneratorsTest, Deterministic) {
  const GeneratedData a = GenerateSurveyLike(300, 3);
  const GeneratedData b = GenerateSurveyLike(300, 3);
  for (size_t attr = 0; attr < a.schema.size(); ++attr) {
    for (size_t r = 0; r < 300; ++r) {
      ASSERT_EQ(a.data.at(r, attr), b.data.at(r, attr));
    }
  }
}

TEST(RunSynthesisTest, AllHardInputSkipsWeightLearning) {
  const GeneratedData g = GenerateAdultLike(600, 1);
  const auto dcs = ParseDcText(g.dc_text, g.schema).value();
  RunOptions options;
  const RunResult r = RunSynthesis(g.data, dcs, options).value();
  EXPECT_FALSE(r.learned_weights);
  EXPECT_FALSE(r.config.learn_weights);
  EXPECT_FALSE(r.budget.learn_weights);
  EXPECT_EQ(StageCount(r.budget, "weights"), 0.0);
  EXPECT_EQ(r.weight_sample_rows, 0u);
  for (double w : r.weights)
    EXPECT_EQ(w, std::numeric_limits<double>::infinity());
}

TEST(RunSynthesisTest, UnweightedSoftConstraintsLearnWeights) {
  const GeneratedData g = GenerateSurveyLike(600, 1);
  const auto dcs = ParseDcText(g.dc_text, g.schema).value();
  RunOptions options;
  const RunResult r = RunSynthesis(g.data, dcs, options).value();
  EXPECT_TRUE(r.learned_weights);
  EXPECT_TRUE(r.budget.learn_weights);
  EXPECT_EQ(StageCount(r.budget, "weights"), 1.0);
  EXPECT_GT(r.weight_sample_rows, 0u);
  for (double w : r.weights) {
    EXPECT_GE(w, 0.0);
    EXPECT_LE(w, r.config.weight_max);
  }
}

TEST(RunSynthesisTest, GivenSoftWeightsAreUsedAsIs) {
  const GeneratedData g = GenerateSurveyLike(400, 2);
  std::string text = g.dc_text;
  for (size_t p = text.find("soft "); p != std::string::npos;
       p = text.find("soft ", p)) {
    text.replace(p, 5, "soft(1.5) ");
  }
  const auto dcs = ParseDcText(text, g.schema).value();
  const RunResult r = RunSynthesis(g.data, dcs, RunOptions()).value();
  EXPECT_FALSE(r.learned_weights);
  for (double w : r.weights) EXPECT_EQ(w, 1.5);
}

TEST(RunSynthesisTest, DeskScaleRunMeetsBudget) {
  const GeneratedData g = GenerateAdultLike(2000, 11);
  const auto dcs = ParseDcText(g.dc_text, g.schema).value();
  RunOptions options;
  options.epsilon = 1.0;
  options.delta = 1e-6;
  const RunResult r = RunSynthesis(g.data, dcs, options).value();
  EXPECT_LE(r.budget.eps.epsilon, 1.0);
  EXPECT_EQ(r.synthetic.num_rows(), 2000u);
  EXPECT_EQ(r.input_rows, 2000u);
  std::vector<std::string> stages;
  for (const StageTiming& t : r.timings) {
    stages.push_back(t.stage);
    EXPECT_GE(t.seconds, 0.0);
  }
  const std::vector<std::string> expected = {"sequencing", "search", "training",
                                             "weights", "sampling"};
  EXPECT_EQ(stages, expected);
}

TEST(RunSynthesisTest, OutputRowsOverride) {
  const GeneratedData g = GenerateAdultLike(300, 4);
  const auto dcs = ParseDcText(g.dc_text, g.schema).value();
  RunOptions options;
  options.output_rows = 120;
  const RunResult r = RunSynthesis(g.data, dcs, options).value();
  EXPECT_EQ(r.synthetic.num_rows(), 120u);
}

TEST(RunSynthesisTest, TinyBudgetIsInfeasible) {
  const GeneratedData g = GenerateAdultLike(200, 4);
  const auto dcs = ParseDcText(g.dc_text, g.schema).value();
  RunOptions options;
  options.epsilon = 1e-3;
  const auto r = RunSynthesis(g.data, dcs, options);
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(HasErrorKind(r.status(), ErrorKind::kBudgetInfeasible))
      << r.status();
}

TEST(RunSynthesisTest, PinnedKnobsAreKept) {
  const GeneratedData g = GenerateAdultLike(500, 4);
  const auto dcs = ParseDcText(g.dc_text, g.schema).value();
  RunOptions options;
  options.epsilon = 50.0;
  options.sigma_d = 2.0;
  options.iterations = 40;
  const RunResult r = RunSynthesis(g.data, dcs, options).value();
  EXPECT_EQ(r.config.sigma_d, 2.0);
  EXPECT_EQ(r.config.iterations, 40);
}

TEST(ArtifactsTest, IdenticalRunsGiveIdenticalCsv) {
  const GeneratedData g = GenerateSurveyLike(500, 5);
  const auto dcs = ParseDcText(g.dc_text, g.schema).value();
  RunOptions options;
  options.seed = 42;
  options.mcmc_resamples = 50;
  const std::filesystem::path a = TempDir("det_a");
  const std::filesystem::path b = TempDir("det_b");
  for (const auto& dir : {a, b}) {
    const RunResult r = RunSynthesis(g.data, dcs, options).value();
    ASSERT_TRUE(WriteArtifacts(r, dcs, options, dir.string(), {}).ok());
  }
  const std::string csv_a = ReadFile(a / "synthetic.csv");
  EXPECT_FALSE(csv_a.empty());
  EXPECT_EQ(csv_a, ReadFile(b / "synthetic.csv"));
  EXPECT_EQ(ReadFile(a / "model.json"), ReadFile(b / "model.json"));

  options.seed = 43;
  const std::filesystem::path c = TempDir("det_c");
  const RunResult r = RunSynthesis(g.data, dcs, options).value();
  ASSERT_TRUE(WriteArtifacts(r, dcs, options, c.string(), {}).ok());
  EXPECT_NE(csv_a, ReadFile(c / "synthetic.csv"));
}

TEST(ArtifactsTest, ManifestReplaysToReportedEpsilon) {
  for (bool survey : {false, true}) {
    const GeneratedData g =
        survey ? GenerateSurveyLike(800, 9) : GenerateAdultLike(800, 9);
    const auto dcs = ParseDcText(g.dc_text, g.schema).value();
    RunOptions options;
    options.epsilon = 2.0;
    const RunResult r = RunSynthesis(g.data, dcs, options).value();
    const std::filesystem::path dir = TempDir(survey ? "replay_s" : "replay_a");
    ASSERT_TRUE(WriteArtifacts(r, dcs, options, dir.string(), {}).ok());
    const nlohmann::json manifest =
        nlohmann::json::parse(ReadFile(dir / "manifest.json"));
    const PrivacyConfig config =
        PrivacyConfig::FromJson(manifest["config"]).value();
    ModelShape shape;
    shape.num_histograms = manifest["shape"]["num_histograms"];
    shape.num_submodels = manifest["shape"]["num_submodels"];
    const BudgetReport replay =
        Account(config, manifest["rows"]["input"].get<size_t>(), shape,
                manifest["delta"].get<double>())
            .value();
    EXPECT_EQ(replay.eps.epsilon, manifest["epsilon"].get<double>());
    EXPECT_EQ(replay.eps.epsilon, r.budget.eps.epsilon);
    EXPECT_LE(replay.eps.epsilon, 2.0);
  }
}

TEST(ArtifactsTest, WritesEveryArtifact) {
  const GeneratedData g = GenerateAdultLike(300, 6);
  const auto dcs = ParseDcText(g.dc_text, g.schema).value();
  RunOptions options;
  const RunResult r = RunSynthesis(g.data, dcs, options).value();
  const std::filesystem::path dir = TempDir("files");
  ASSERT_TRUE(
      WriteArtifacts(r, dcs, options, dir.string(), {{"data", "x.csv"}}).ok());
  for (const char* f : {"synthetic.csv", "model.json", "budget.json",
                        "violations.json", "manifest.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  const nlohmann::json manifest =
      nlohmann::json::parse(ReadFile(dir / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 0);
  EXPECT_EQ(manifest["inputs"]["data"], "x.csv");
  EXPECT_EQ(manifest["weights"]["phi1"], "inf");
  EXPECT_TRUE(manifest["timings_seconds"].contains("training"));
  EXPECT_TRUE(manifest["timings_seconds"].contains("sampling"));
  const nlohmann::json model =
      nlohmann::json::parse(ReadFile(dir / "model.json"));
  const ProbModel back = ProbModel::FromJson(model).value();
  EXPECT_EQ(back.units.size(), r.model.units.size());
  const Dataset reread =
      LoadDataset((dir / "synthetic.csv").string(), g.schema).value();
  EXPECT_EQ(reread.num_rows(), r.synthetic.num_rows());
}

}  // namespace
}  // namespace kamino
