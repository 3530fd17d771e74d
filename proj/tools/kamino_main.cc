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

// Command-line front end: synth, sequence, account, evaluate, generate.
//
// Exit codes: 0 success, 2 infeasible budget, 3 invalid input, 4 internal.

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "kamino/accountant.h"
#include "kamino/dataset.h"
#include "kamino/denial_constraint.h"
#include "kamino/evaluator.h"
#include "kamino/generators.h"
#include "kamino/pipeline.h"
#include "kamino/schema.h"
#include "kamino/sequencing.h"
#include "kamino/status.h"
#include "nlohmann/json.hpp"

namespace kamino {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitInput = 3;
constexpr int kExitInternal = 4;

int ExitCodeFor(const absl::Status& status) {
  if (status.ok()) return kExitOk;
  const std::optional<ErrorKind> kind = ErrorKindOf(status);
  if (!kind.has_value()) return kExitInternal;
  switch (*kind) {
    case ErrorKind::kBudgetInfeasible:
      return kExitInfeasible;
    case ErrorKind::kMissingColumn:
    case ErrorKind::kDomainViolation:
    case ErrorKind::kParseError:
    case ErrorKind::kNotNumerical:
    case ErrorKind::kOutOfRange:
    case ErrorKind::kSyntaxError:
    case ErrorKind::kUnknownAttribute:
    case ErrorKind::kTypeMismatch:
    case ErrorKind::kInsufficientAttributes:
    case ErrorKind::kInvalidOrder:
    case ErrorKind::kInvalidRate:
    case ErrorKind::kSchemaMismatch:
    case ErrorKind::kInvalidSchema:
    case ErrorKind::kIoError:
      return kExitInput;
    default:
      return kExitInternal;
  }
}

int Fail(const absl::Status& status) {
  std::cerr << "kamino: " << status.message() << "\n";
  return ExitCodeFor(status);
}

std::string EnvName(const std::string& key) {
  std::string out = "KAMINO_";
  for (char c : key) out += static_cast<char>(std::toupper(c));
  return out;
}

// Parses "key=value" with a JSON value when it parses as one, else a string.
absl::Status ApplySetting(const std::string& text, nlohmann::json* out) {
  const size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    return MakeError(ErrorKind::kParseError,
                     absl::StrCat("expected key=value, got '", text, "'"));
  }
  const std::string key = text.substr(0, eq);
  const std::string value = text.substr(eq + 1);
  nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
  (*out)[key] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
  return absl::OkStatus();
}

absl::StatusOr<nlohmann::json> ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return MakeError(ErrorKind::kIoError,
                     absl::StrCat("cannot read '", path, "'"));
  }
  nlohmann::json json = nlohmann::json::parse(in, nullptr, false);
  if (json.is_discarded()) {
    return MakeError(ErrorKind::kParseError,
                     absl::StrCat("'", path, "' is not valid JSON"));
  }
  return json;
}

absl::Status WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) {
    return MakeError(ErrorKind::kIoError,
                     absl::StrCat("cannot write '", path, "'"));
  }
  return absl::OkStatus();
}

// Output goes to `path`, or to stdout when it is empty.
absl::Status Emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return absl::OkStatus();
  }
  return WriteText(path, text);
}

struct SynthArgs {
  std::string data, schema, dcs, out;
  double eps = 1.0;
  double delta = 1e-6;
  uint64_t seed = 0;
  bool parallel = false;
  bool ar = false;
  int m = 0;
  std::optional<size_t> rows;
  std::string config_file;
  std::vector<std::string> settings;
};

// Resolves the base configuration: defaults, then a JSON file, then
// KAMINO_<FIELD> variables, then --set. Search knobs set in any of these are
// pinned.
absl::Status ResolveConfig(const SynthArgs& args, RunOptions* options) {
  const nlohmann::json known = PrivacyConfig().ToJson();
  // Every field set explicitly, by file, environment or flag.
  nlohmann::json explicit_fields = nlohmann::json::object();
  if (!args.config_file.empty()) {
    KAMINO_ASSIGN_OR_RETURN(nlohmann::json file,
                            ReadJsonFile(args.config_file));
    if (file.contains("config")) file = file["config"];
    if (!file.is_object()) {
      return MakeError(ErrorKind::kParseError,
                       "configuration must be an object");
    }
    explicit_fields.update(file);
  }
  for (const auto& [key, unused] : known.items()) {
    if (const char* env = std::getenv(EnvName(key).c_str())) {
      KAMINO_RETURN_IF_ERROR(
          ApplySetting(absl::StrCat(key, "=", env), &explicit_fields));
    }
  }
  for (const std::string& s : args.settings) {
    KAMINO_RETURN_IF_ERROR(ApplySetting(s, &explicit_fields));
  }
  for (const auto& [key, unused] : explicit_fields.items()) {
    if (!known.contains(key)) {
      return MakeError(ErrorKind::kParseError,
                       absl::StrCat("unknown configuration field '", key, "'"));
    }
  }
  nlohmann::json json = known;
  json.update(explicit_fields);
  KAMINO_ASSIGN_OR_RETURN(options->base, PrivacyConfig::FromJson(json));
  const PrivacyConfig& c = options->base;
  if (explicit_fields.contains("sigma_g")) options->sigma_g = c.sigma_g;
  if (explicit_fields.contains("sigma_d")) options->sigma_d = c.sigma_d;
  if (explicit_fields.contains("sigma_w")) options->sigma_w = c.sigma_w;
  if (explicit_fields.contains("batch_size"))
    options->batch_size = c.batch_size;
  if (explicit_fields.contains("iterations"))
    options->iterations = c.iterations;
  return absl::OkStatus();
}

int RunSynth(const SynthArgs& args) {
  if (!(args.eps > 0.0)) {
    return Fail(MakeError(ErrorKind::kOutOfRange, "--eps must be positive"));
  }
  if (!(args.delta > 0.0 && args.delta < 1.0)) {
    return Fail(
        MakeError(ErrorKind::kOutOfRange, "--delta must lie in (0, 1)"));
  }
  if (args.m < 0) {
    return Fail(MakeError(ErrorKind::kOutOfRange, "--m must be non-negative"));
  }
  RunOptions options;
  options.epsilon = args.eps;
  options.delta = args.delta;
  options.seed = args.seed;
  options.parallel = args.parallel;
  options.accept_reject = args.ar;
  options.mcmc_resamples = args.m;
  options.output_rows = args.rows;
  if (absl::Status s = ResolveConfig(args, &options); !s.ok()) return Fail(s);

  absl::StatusOr<Schema> schema = Schema::LoadJsonFile(args.schema);
  if (!schema.ok()) return Fail(schema.status());
  absl::StatusOr<Dataset> data = LoadDataset(args.data, *schema);
  if (!data.ok()) return Fail(data.status());
  absl::StatusOr<std::vector<DenialConstraint>> dcs =
      ParseDcFile(args.dcs, *schema);
  if (!dcs.ok()) return Fail(dcs.status());

  absl::StatusOr<RunResult> result = RunSynthesis(*data, *dcs, options);
  if (!result.ok()) return Fail(result.status());
  const nlohmann::json inputs = {
      {"data", args.data}, {"schema", args.schema}, {"dcs", args.dcs}};
  if (absl::Status s = WriteArtifacts(*result, *dcs, options, args.out, inputs);
      !s.ok()) {
    return Fail(s);
  }
  std::cout << "epsilon " << result->budget.eps.epsilon << " (alpha "
            << result->budget.eps.alpha << ", delta " << options.delta << ")\n";
  for (const StageTiming& t : result->timings) {
    std::cout << t.stage << " " << t.seconds << "s\n";
  }
  std::cout << "wrote " << args.out << "\n";
  return kExitOk;
}

int RunSequence(const std::string& schema_path, const std::string& dcs_path,
                bool optimize, const std::string& out) {
  absl::StatusOr<Schema> schema = Schema::LoadJsonFile(schema_path);
  if (!schema.ok()) return Fail(schema.status());
  absl::StatusOr<std::vector<DenialConstraint>> dcs =
      ParseDcFile(dcs_path, *schema);
  if (!dcs.ok()) return Fail(dcs.status());
  SchemaSequence seq = Sequence(*schema, *dcs);
  if (optimize) seq = ApplyDomainOptimizations(seq, *schema, *dcs, {});
  if (absl::Status s = Emit(out, seq.ToJson(*schema).dump(2) + "\n"); !s.ok()) {
    return Fail(s);
  }
  return kExitOk;
}

struct AccountArgs {
  std::string manifest, config;
  std::optional<size_t> rows, histograms, submodels;
  std::optional<double> delta;
  std::string out;
};

// Replays a configuration through the accountant. A manifest supplies the
// configuration, row count, model shape and delta; flags override them.
int RunAccount(const AccountArgs& args) {
  nlohmann::json source = nlohmann::json::object();
  if (!args.manifest.empty()) {
    absl::StatusOr<nlohmann::json> m = ReadJsonFile(args.manifest);
    if (!m.ok()) return Fail(m.status());
    source = *m;
  }
  nlohmann::json config_json = source.value("config", nlohmann::json::object());
  if (!args.config.empty()) {
    absl::StatusOr<nlohmann::json> c = ReadJsonFile(args.config);
    if (!c.ok()) return Fail(c.status());
    config_json = c->contains("config") ? (*c)["config"] : *c;
  }
  absl::StatusOr<PrivacyConfig> config = PrivacyConfig::FromJson(config_json);
  if (!config.ok()) return Fail(config.status());

  std::optional<size_t> rows = args.rows;
  if (!rows && source.contains("rows")) rows = source["rows"].value("input", 0);
  std::optional<double> delta = args.delta;
  if (!delta && source.contains("delta")) delta = source["delta"].get<double>();
  ModelShape shape;
  if (source.contains("shape")) {
    shape.num_histograms = source["shape"].value("num_histograms", 1);
    shape.num_submodels = source["shape"].value("num_submodels", 0);
  }
  if (args.histograms) shape.num_histograms = *args.histograms;
  if (args.submodels) shape.num_submodels = *args.submodels;
  if (!rows || *rows == 0) {
    return Fail(
        MakeError(ErrorKind::kOutOfRange, "row count missing (--rows)"));
  }
  if (!delta) {
    return Fail(MakeError(ErrorKind::kOutOfRange, "delta missing (--delta)"));
  }
  absl::StatusOr<BudgetReport> report = Account(*config, *rows, shape, *delta);
  if (!report.ok()) return Fail(report.status());
  if (absl::Status s = Emit(args.out, report->ToJson().dump(2) + "\n");
      !s.ok()) {
    return Fail(s);
  }
  return kExitOk;
}

struct EvaluateArgs {
  std::string truth, synth, schema, dcs, metric = "max", out;
  std::vector<int> alphas = {1, 2};
  bool json = false;
};

int RunEvaluate(const EvaluateArgs& args) {
  absl::StatusOr<Schema> schema = Schema::LoadJsonFile(args.schema);
  if (!schema.ok()) return Fail(schema.status());
  absl::StatusOr<Dataset> truth = LoadDataset(args.truth, *schema);
  if (!truth.ok()) return Fail(truth.status());
  absl::StatusOr<Dataset> synth = LoadDataset(args.synth, *schema);
  if (!synth.ok()) return Fail(synth.status());
  std::vector<DenialConstraint> dcs;
  if (!args.dcs.empty()) {
    absl::StatusOr<std::vector<DenialConstraint>> parsed =
        ParseDcFile(args.dcs, *schema);
    if (!parsed.ok()) return Fail(parsed.status());
    dcs = *std::move(parsed);
  }
  const MarginalMetric metric =
      args.metric == "l1" ? MarginalMetric::kHalfL1 : MarginalMetric::kMax;
  absl::StatusOr<EvaluationReport> report =
      Evaluate(*truth, *synth, dcs, args.alphas, metric);
  if (!report.ok()) return Fail(report.status());
  const std::string text =
      args.json ? report->ToJson().dump(2) + "\n" : report->ToText();
  if (absl::Status s = Emit(args.out, text); !s.ok()) return Fail(s);
  return kExitOk;
}

int RunGenerate(const std::string& kind, size_t rows, uint64_t seed,
                const std::string& out) {
  GeneratedData g = kind == "survey" ? GenerateSurveyLike(rows, seed)
                                     : GenerateAdultLike(rows, seed);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) {
    return Fail(MakeError(ErrorKind::kIoError,
                          absl::StrCat("cannot create '", out, "'")));
  }
  const std::filesystem::path root(out);
  absl::Status s = WriteCsvFile(g.data, (root / "data.csv").string());
  if (s.ok()) {
    s = WriteText((root / "schema.json").string(),
                  g.schema.ToJson().dump(2) + "\n");
  }
  if (s.ok()) s = WriteText((root / "rules.dc").string(), g.dc_text);
  if (!s.ok()) return Fail(s);
  std::cout << "wrote " << rows << " rows to " << out << "\n";
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Constraint-aware differentially private data synthesis"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "Synthesize a private instance");
  synth_cmd->alias("synthesize");
  synth_cmd->add_option("--data", synth.data, "Input CSV")
      ->required()
      ->envname("KAMINO_DATA");
  synth_cmd->add_option("--schema", synth.schema, "Schema JSON")
      ->required()
      ->envname("KAMINO_SCHEMA");
  synth_cmd->add_option("--dcs", synth.dcs, "Denial constraint file")
      ->required()
      ->envname("KAMINO_DCS");
  synth_cmd->add_option("--out", synth.out, "Output directory")
      ->required()
      ->envname("KAMINO_OUT");
  synth_cmd->add_option("--eps", synth.eps, "Privacy budget epsilon")
      ->envname("KAMINO_EPS");
  synth_cmd->add_option("--delta", synth.delta, "Privacy budget delta")
      ->envname("KAMINO_DELTA");
  synth_cmd->add_option("--seed", synth.seed, "Random seed")
      ->envname("KAMINO_SEED");
  synth_cmd
      ->add_flag("--parallel", synth.parallel,
                 "Train sub-models independently in parallel")
      ->envname("KAMINO_PARALLEL");
  synth_cmd->add_flag("--ar", synth.ar, "Accept-reject sampling")
      ->envname("KAMINO_AR");
  synth_cmd->add_option("--m", synth.m, "MCMC re-sampled cells per column")
      ->envname("KAMINO_M");
  synth_cmd
      ->add_option("--rows", synth.rows, "Output rows (default: input size)")
      ->envname("KAMINO_ROWS");
  synth_cmd->add_option("--config", synth.config_file,
                        "Configuration JSON (or a manifest)");
  synth_cmd->add_option("--set", synth.settings,
                        "Configuration override key=value (repeatable)");

  std::string seq_schema, seq_dcs, seq_out;
  bool seq_optimize = true;
  CLI::App* seq_cmd =
      app.add_subcommand("sequence", "Print the attribute sequence");
  seq_cmd->add_option("--schema", seq_schema, "Schema JSON")->required();
  seq_cmd->add_option("--dcs", seq_dcs, "Denial constraint file")->required();
  seq_cmd->add_option("--out", seq_out, "Output file (default: stdout)");
  seq_cmd->add_flag("--optimize,!--no-optimize", seq_optimize,
                    "Group small domains and flag large ones");

  AccountArgs account;
  CLI::App* account_cmd =
      app.add_subcommand("account", "Privacy cost of a configuration");
  account_cmd->add_option("--manifest", account.manifest,
                          "Run manifest to replay");
  account_cmd->add_option("--config", account.config, "Configuration JSON");
  account_cmd->add_option("--rows", account.rows, "Number of private rows");
  account_cmd->add_option("--histograms", account.histograms,
                          "Noisy histograms released");
  account_cmd->add_option("--submodels", account.submodels,
                          "DPSGD-trained sub-models");
  account_cmd->add_option("--delta", account.delta, "Target delta");
  account_cmd->add_option("--out", account.out,
                          "Output file (default: stdout)");

  EvaluateArgs eval;
  CLI::App* eval_cmd = app.add_subcommand(
      "evaluate", "Compare a synthetic instance with the truth");
  eval_cmd->add_option("--truth", eval.truth, "True CSV")->required();
  eval_cmd->add_option("--synth", eval.synth, "Synthetic CSV")->required();
  eval_cmd->add_option("--schema", eval.schema, "Schema JSON")->required();
  eval_cmd->add_option("--dcs", eval.dcs, "Denial constraint file");
  eval_cmd->add_option("--alpha", eval.alphas, "Marginal sizes (1 and/or 2)")
      ->delimiter(',');
  eval_cmd->add_option("--metric", eval.metric, "max or l1")
      ->check(CLI::IsMember({"max", "l1"}));
  eval_cmd->add_flag("--json", eval.json, "JSON instead of a text table");
  eval_cmd->add_option("--out", eval.out, "Output file (default: stdout)");

  std::string gen_kind = "adult", gen_out;
  size_t gen_rows = 2000;
  uint64_t gen_seed = 0;
  CLI::App* gen_cmd = app.add_subcommand(
      "generate", "Write a demo instance, schema and constraints");
  gen_cmd->add_option("--kind", gen_kind, "adult or survey")
      ->check(CLI::IsMember({"adult", "survey"}));
  gen_cmd->add_option("--rows", gen_rows, "Rows");
  gen_cmd->add_option("--seed", gen_seed, "Seed");
  gen_cmd->add_option("--out", gen_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*synth_cmd) return RunSynth(synth);
    if (*seq_cmd)
      return RunSequence(seq_schema, seq_dcs, seq_optimize, seq_out);
    if (*account_cmd) return RunAccount(account);
    if (*eval_cmd) return RunEvaluate(eval);
    if (*gen_cmd) return RunGenerate(gen_kind, gen_rows, gen_seed, gen_out);
  } catch (const std::exception& e) {
    std::cerr << "kamino: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace
}  // namespace kamino

int main(int argc, char** argv) { return kamino::Main(argc, argv); }
