// Copyright 2026 The FlowSim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "flowsim/correlation.h"
#include "flowsim/errors.h"
#include "flowsim/eval.h"
#include "flowsim/features.h"
#include "flowsim/generator.h"
#include "flowsim/pipeline.h"
#include "flowsim/prompt.h"
#include "flowsim/retrieval.h"
#include "flowsim/structure.h"
#include "flowsim/tree_metric.h"
#include "flowsim/workflow.h"

namespace flowsim {
namespace {

struct CommonOptions {
  std::string rules_path;
  std::string gate = "on";
  std::string format = "json";
  std::string out_path;
  std::string normalizer = "max";
  bool annotations = false;
  std::string dataset_format = "jsonl";
  int threads = 1;
};

struct ScoreOptions {
  std::string expected;
  std::string generated;
  std::string dataset;
  std::string mode = "both";
};

struct ValidateOptions {
  std::string workflow;
  std::string dataset;
  bool expected = false;
};

struct RetrieveOptions {
  std::string catalog;
  std::string query;
  std::string dataset;
  std::string installation;
  bool artifacts = false;
  bool perfect_rag = false;
  std::size_t k = 0;
};

struct GenerateOptions {
  std::string dataset;
  std::string catalog;
  std::string generator = "mock";
  std::string fixtures;
  std::string remote_config;
  std::string trace_path;
  std::string create_template;
  std::string populate_template;
  std::string instructions;
  std::string installation;
  bool perfect_rag = false;
  std::size_t k = kDefaultStepK;
  std::size_t artifact_k = kDefaultArtifactK;
};

struct AnalyzeOptions {
  std::string features;
  std::vector<std::string> reports;
  std::string vocabulary;
  std::string mode = "full";
};

struct CorrelateOptions {
  std::string csv;
  std::string human = "human";
  std::string metric = "metric";
  bool exact = false;
};

struct ReportOptions {
  std::string report;
};

Json ParseJsonFile(const std::string& path) {
  try {
    return Json::parse(ReadFile(path));
  } catch (const Json::parse_error& e) {
    throw SyntaxError(path + ": " + e.what());
  }
}

Workflow LoadWorkflow(const std::string& path, bool lenient) {
  return ParseWorkflow(ReadFile(path), ParseOptions{.lenient = lenient});
}

void Emit(const CommonOptions& common, std::string_view text, std::ostream& out) {
  if (common.out_path.empty()) {
    out << text;
  } else {
    WriteFile(common.out_path, text);
  }
}

FlowSimOptions MakeFlowSimOptions(const CommonOptions& common) {
  FlowSimOptions options;
  options.normalizer = common.normalizer == "sum" ? Normalizer::kSumSize : Normalizer::kMaxSize;
  options.tree.include_annotations = common.annotations;
  return options;
}

RuleSet MakeRules(const CommonOptions& common) {
  return common.rules_path.empty() ? DefaultRuleSet() : LoadRuleSet(common.rules_path);
}

DatasetFormat MakeDatasetFormat(const CommonOptions& common) {
  return common.dataset_format == "dir" ? DatasetFormat::kDirectory : DatasetFormat::kJsonl;
}

Json ScoreJson(const FlowSimScore& score) {
  return {{"mode", ToString(score.mode)},
          {"value", score.value},
          {"distance", score.distance},
          {"normalizer", score.normalizer},
          {"gated", score.gated}};
}

int RunScore(const CommonOptions& common, const ScoreOptions& options, std::ostream& out) {
  const FlowSimOptions flow_sim = MakeFlowSimOptions(common);
  if (!options.dataset.empty()) {
    EvalConfig config;
    config.flow_sim = flow_sim;
    config.rules = MakeRules(common);
    config.gate = common.gate == "on";
    config.threads = common.threads;
    const auto samples = LoadDataset(options.dataset, MakeDatasetFormat(common));
    const EvalReport report = Evaluate(samples, config);
    Emit(common, RenderReport(report, *ParseReportFormat(common.format)), out);
    return kExitOk;
  }
  if (options.expected.empty() || options.generated.empty()) {
    throw CLI::ValidationError("score", "needs --dataset or both --expected and --generated");
  }
  const Workflow expected = LoadWorkflow(options.expected, false);
  const Workflow generated = LoadWorkflow(options.generated, true);
  const StructureReport structure = ValidateStructure(generated, MakeRules(common), "generated");
  Json result = {{"structure", ToJson(structure)}};
  std::vector<FlowSimMode> modes;
  if (options.mode != "full") modes.push_back(FlowSimMode::kOutline);
  if (options.mode != "outline") modes.push_back(FlowSimMode::kOutlineAndInputs);
  for (FlowSimMode mode : modes) {
    FlowSimScore score = FlowSim(expected, generated, mode, flow_sim);
    if (common.gate == "on" && structure.has_errors()) {
      score.value = 0.0;
      score.gated = true;
    }
    result[mode == FlowSimMode::kOutline ? "flow_sim_outline" : "flow_sim_full"] =
        ScoreJson(score);
  }
  Emit(common, result.dump(2) + "\n", out);
  return kExitOk;
}

int RunValidate(const CommonOptions& common, const ValidateOptions& options,
                std::ostream& out) {
  const RuleSet rules = MakeRules(common);
  Json result;
  if (!options.workflow.empty()) {
    result = ToJson(ValidateStructure(LoadWorkflow(options.workflow, true), rules,
                                      options.workflow));
  } else if (!options.dataset.empty()) {
    const auto samples = LoadDataset(options.dataset, MakeDatasetFormat(common));
    std::vector<StructureReport> reports;
    Json list = Json::array();
    for (const EvalSample& sample : samples) {
      if (!options.expected && !sample.generated) continue;
      const Workflow& target = options.expected ? sample.expected : *sample.generated;
      reports.push_back(ValidateStructure(target, rules, sample.id));
      list.push_back(ToJson(reports.back()));
    }
    result = {{"reports", std::move(list)},
              {"structure_error_rate",
               reports.empty() ? Json(nullptr) : Json(StructureErrorRate(reports))}};
  } else {
    throw CLI::ValidationError("validate", "needs --workflow or --dataset");
  }
  Emit(common, result.dump(2) + "\n", out);
  return kExitOk;
}

StepCatalog LoadCatalog(const std::string& path, const std::string& installation) {
  StepCatalog catalog = StepCatalog::Load(path);
  return installation.empty() ? catalog : catalog.ForInstallation(installation);
}

int RunRetrieve(const CommonOptions& common, const RetrieveOptions& options,
                std::ostream& out) {
  const StepCatalog catalog = LoadCatalog(options.catalog, options.installation);
  if (!options.query.empty()) {
    const std::size_t k = options.k ? options.k
                                    : (options.artifacts ? kDefaultArtifactK : kDefaultStepK);
    const SuggestionSet set = options.artifacts ? SuggestArtifacts(options.query, catalog, k)
                                                : SuggestSteps(options.query, catalog, k);
    Emit(common, ToJson(set).dump(2) + "\n", out);
    return kExitOk;
  }
  if (options.dataset.empty()) {
    throw CLI::ValidationError("retrieve", "needs --query or --dataset");
  }
  const std::size_t k = options.k ? options.k : kDefaultStepK;
  const auto samples = LoadDataset(options.dataset, MakeDatasetFormat(common));
  Json list = Json::array();
  double total = 0.0;
  for (const EvalSample& sample : samples) {
    const SuggestionSet set = options.perfect_rag
                                  ? PerfectRag(sample.expected, catalog, k, sample.requirement)
                                  : SuggestSteps(sample.requirement, catalog, k);
    const double recall = RecallAtK(set, sample.expected);
    total += recall;
    list.push_back({{"id", sample.id}, {"recall_at_k", recall}, {"k", set.k}});
  }
  const Json result = {
      {"perfect_rag", options.perfect_rag},
      {"samples", std::move(list)},
      {"mean_recall_at_k",
       samples.empty() ? Json(nullptr) : Json(total / static_cast<double>(samples.size()))}};
  Emit(common, result.dump(2) + "\n", out);
  return kExitOk;
}

std::unique_ptr<Generator> MakeGenerator(const GenerateOptions& options) {
  if (options.generator == "mock") {
    if (options.fixtures.empty()) {
      throw CLI::ValidationError("generate", "--generator mock needs --fixtures");
    }
    return std::make_unique<MockGenerator>(MockGenerator::Load(options.fixtures));
  }
  if (options.remote_config.empty()) {
    throw CLI::ValidationError("generate", "--generator remote needs --remote-config");
  }
  return std::make_unique<RemoteGenerator>(
      RemoteGeneratorConfig::FromJson(ParseJsonFile(options.remote_config)));
}

int RunGenerate(const CommonOptions& common, const GenerateOptions& options,
                std::ostream& out, std::ostream& err) {
  const StepCatalog catalog = LoadCatalog(options.catalog, options.installation);
  PipelineTemplates templates;
  if (!options.create_template.empty()) {
    templates.create_flow = PromptTemplate::Load(options.create_template);
  }
  if (!options.populate_template.empty()) {
    templates.populate_inputs = PromptTemplate::Load(options.populate_template);
  }
  if (!options.instructions.empty()) {
    templates.instructions = InstructionsFromJson(ParseJsonFile(options.instructions));
  }
  std::unique_ptr<Generator> generator = MakeGenerator(options);
  std::vector<EvalSample> samples = LoadDataset(options.dataset, MakeDatasetFormat(common));

  std::vector<PipelineTrace> traces(samples.size());
  auto run_one = [&](std::size_t i) {
    PipelineOptions pipeline;
    pipeline.sample_key = samples[i].id;
    pipeline.step_k = options.k;
    pipeline.artifact_k = options.artifact_k;
    if (options.perfect_rag) pipeline.perfect_rag_expected = &samples[i].expected;
    PipelineResult result =
        RunPipeline(samples[i].requirement, catalog, templates, *generator, pipeline);
    samples[i].generated = std::move(result.workflow);
    traces[i] = std::move(result.trace);
  };

  const std::size_t workers = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(1, common.threads)), 1,
      std::max<std::size_t>(1, samples.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < samples.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < samples.size(); i = next++) {
            try {
              run_one(i);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  if (!options.trace_path.empty()) {
    std::string lines;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      lines += Json{{"id", samples[i].id}, {"trace", ToJson(traces[i])}}.dump() + "\n";
    }
    WriteFile(options.trace_path, lines);
  }
  Emit(common, DatasetToJsonl(samples), out);

  const bool all_failed =
      !samples.empty() && std::all_of(traces.begin(), traces.end(), [](const PipelineTrace& t) {
        return t.outline_failed;
      });
  if (all_failed) {
    err << "generator failed for every sample\n";
    return kExitGeneratorFailure;
  }
  return kExitOk;
}

EvalReport LoadReport(const std::string& path) { return EvalReportFromJson(ParseJsonFile(path)); }

int RunAnalyze(const CommonOptions& common, const AnalyzeOptions& options, std::ostream& out) {
  const FlowSimMode mode =
      options.mode == "outline" ? FlowSimMode::kOutline : FlowSimMode::kOutlineAndInputs;
  const bool gated = common.gate == "on";
  std::vector<FeatureGroup> groups;
  if (!options.vocabulary.empty()) groups = LoadFeatureVocabulary(options.vocabulary).groups;

  std::vector<std::string> features;
  const auto rows = FeatureMatrix::ParseCsv(ReadFile(options.features), &features);
  std::map<std::string, FeatureMatrix> per_model;
  for (const std::string& spec : options.reports) {
    const auto eq = spec.find('=');
    const std::string model = eq == std::string::npos ? spec : spec.substr(0, eq);
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    per_model.emplace(model,
                      FeatureMatrix(features, rows, ScoresFromReport(LoadReport(path), mode, gated)));
  }
  // Groups whose members are not all in this matrix are skipped.
  std::erase_if(groups, [&](const FeatureGroup& g) {
    return std::any_of(g.members.begin(), g.members.end(), [&](const std::string& m) {
      return std::find(features.begin(), features.end(), m) == features.end();
    });
  });

  const ReportFormat format = *ParseReportFormat(common.format);
  if (per_model.size() == 1 && format != ReportFormat::kMarkdown) {
    const FeatureMatrix& m = per_model.begin()->second;
    Json group_json = Json::array();
    for (const FeatureGroup& g : groups) {
      const FeatureAverage avg = GroupAverage(m, g);
      group_json.push_back(
          {{"group", g.name}, {"n", avg.n}, {"mean", avg.mean ? Json(*avg.mean) : Json(nullptr)}});
    }
    const Json result = {{"features", ToJson(FeatureAverages(m))}, {"groups", group_json}};
    Emit(common, result.dump(2) + "\n", out);
    return kExitOk;
  }
  const ComparisonTable table = RankModels(per_model, groups);
  Emit(common,
       format == ReportFormat::kMarkdown ? RenderComparisonMarkdown(table)
                                         : ToJson(table).dump(2) + "\n",
       out);
  return kExitOk;
}

std::vector<std::string> SplitComma(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream in(line);
  std::string field;
  while (std::getline(in, field, ',')) {
    field.erase(0, field.find_first_not_of(" \t\r"));
    field.erase(field.find_last_not_of(" \t\r") + 1);
    fields.push_back(field);
  }
  return fields;
}

int RunCorrelate(const CommonOptions& common, const CorrelateOptions& options,
                 std::ostream& out) {
  std::stringstream in(ReadFile(options.csv));
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(options.csv, "empty file");
  const auto header = SplitComma(line);
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SchemaError(options.csv, "no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t hx = column(options.human);
  const std::size_t hy = column(options.metric);
  std::vector<double> x, y;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = SplitComma(line);
    const std::string where = options.csv + ":" + std::to_string(line_no);
    if (fields.size() != header.size()) throw SchemaError(where, "wrong number of fields");
    try {
      std::size_t used = 0;
      x.push_back(std::stod(fields[hx], &used));
      if (used != fields[hx].size()) throw std::invalid_argument("trailing text");
      y.push_back(std::stod(fields[hy], &used));
      if (used != fields[hy].size()) throw std::invalid_argument("trailing text");
    } catch (const std::logic_error&) {
      throw SchemaError(where, "non-numeric value");
    }
  }
  CorrelationOptions correlation;
  correlation.exact_spearman_p = options.exact;
  Emit(common, ToJson(Correlate(x, y, correlation)).dump(2) + "\n", out);
  return kExitOk;
}

int RunReport(const CommonOptions& common, const ReportOptions& options, std::ostream& out) {
  Emit(common, RenderReport(LoadReport(options.report), *ParseReportFormat(common.format)), out);
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"FlowSim: evaluate generated low-code workflows", "flowsim"};
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--rules", common.rules_path, "Structure rule config (JSON)");
    sub->add_option("--gate", common.gate, "Zero scores of structurally broken samples")
        ->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--format", common.format, "Output format")
        ->check(CLI::IsMember({"json", "csv", "md", "markdown"}));
    sub->add_option("-o,--out", common.out_path, "Write output here instead of stdout");
    sub->add_option("--normalizer", common.normalizer, "FlowSim denominator")
        ->check(CLI::IsMember({"max", "sum"}));
    sub->add_flag("--annotations", common.annotations, "Include annotations in tree labels");
    sub->add_option("--dataset-format", common.dataset_format, "Dataset layout")
        ->check(CLI::IsMember({"jsonl", "dir"}));
    sub->add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
  };

  ScoreOptions score;
  CLI::App* score_cmd = app.add_subcommand("score", "Score generated workflows against expected");
  add_common(score_cmd);
  score_cmd->add_option("--expected", score.expected, "Expected workflow JSON");
  score_cmd->add_option("--generated", score.generated, "Generated workflow JSON");
  score_cmd->add_option("--dataset", score.dataset, "Dataset with generated workflows");
  score_cmd->add_option("--mode", score.mode, "FlowSim mode for a single pair")
      ->check(CLI::IsMember({"outline", "full", "both"}));

  ValidateOptions validate;
  CLI::App* validate_cmd = app.add_subcommand("validate", "Report structure violations");
  add_common(validate_cmd);
  validate_cmd->add_option("--workflow", validate.workflow, "Workflow JSON");
  validate_cmd->add_option("--dataset", validate.dataset, "Dataset");
  validate_cmd->add_flag("--expected", validate.expected,
                         "Validate expected workflows instead of generated ones");

  RetrieveOptions retrieve;
  CLI::App* retrieve_cmd = app.add_subcommand("retrieve", "Suggest steps or artifacts");
  add_common(retrieve_cmd);
  retrieve_cmd->add_option("--catalog", retrieve.catalog, "Catalog JSONL")->required();
  retrieve_cmd->add_option("--query", retrieve.query, "Requirement or annotation text");
  retrieve_cmd->add_option("--dataset", retrieve.dataset, "Dataset for recall@k");
  retrieve_cmd->add_option("--installation", retrieve.installation, "Installation tag");
  retrieve_cmd->add_flag("--artifacts", retrieve.artifacts, "Suggest tables, columns, values");
  retrieve_cmd->add_flag("--perfect-rag", retrieve.perfect_rag,
                         "Use the expected workflow's steps as suggestions");
  retrieve_cmd->add_option("--k", retrieve.k, "Suggestions per list")->check(CLI::PositiveNumber);

  GenerateOptions generate;
  CLI::App* generate_cmd = app.add_subcommand("generate", "Run the two-stage pipeline");
  add_common(generate_cmd);
  generate_cmd->add_option("--dataset", generate.dataset, "Dataset of requirements")->required();
  generate_cmd->add_option("--catalog", generate.catalog, "Catalog JSONL")->required();
  generate_cmd->add_option("--generator", generate.generator, "Generator backend")
      ->check(CLI::IsMember({"mock", "remote"}));
  generate_cmd->add_option("--fixtures", generate.fixtures, "Mock responses JSONL");
  generate_cmd->add_option("--remote-config", generate.remote_config, "Remote endpoint JSON");
  generate_cmd->add_option("--trace", generate.trace_path, "Write per-sample call traces");
  generate_cmd->add_option("--create-template", generate.create_template,
                           "createFlow prompt template");
  generate_cmd->add_option("--populate-template", generate.populate_template,
                           "populateInputs prompt template");
  generate_cmd->add_option("--instructions", generate.instructions,
                           "Input-type instruction table");
  generate_cmd->add_option("--installation", generate.installation, "Installation tag");
  generate_cmd->add_flag("--perfect-rag", generate.perfect_rag,
                         "Suggest exactly the expected workflow's steps");
  generate_cmd->add_option("--k", generate.k, "Step suggestions")->check(CLI::PositiveNumber);
  generate_cmd->add_option("--artifact-k", generate.artifact_k, "Artifact suggestions")
      ->check(CLI::PositiveNumber);

  AnalyzeOptions analyze;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Per-feature score averages");
  add_common(analyze_cmd);
  analyze_cmd->add_option("--features", analyze.features, "Feature matrix CSV")->required();
  analyze_cmd->add_option("--report", analyze.reports, "Report JSON, or model=path; repeatable")
      ->required();
  analyze_cmd->add_option("--vocabulary", analyze.vocabulary, "Feature groups JSON");
  analyze_cmd->add_option("--mode", analyze.mode, "FlowSim mode")
      ->check(CLI::IsMember({"outline", "full"}));

  CorrelateOptions correlate;
  CLI::App* correlate_cmd = app.add_subcommand("correlate", "Pearson and Spearman correlation");
  add_common(correlate_cmd);
  correlate_cmd->add_option("--csv", correlate.csv, "CSV with a header row")->required();
  correlate_cmd->add_option("--human", correlate.human, "First column name");
  correlate_cmd->add_option("--metric", correlate.metric, "Second column name");
  correlate_cmd->add_flag("--exact", correlate.exact, "Exact permutation p for Spearman");

  ReportOptions report;
  CLI::App* report_cmd = app.add_subcommand("report", "Render a saved report");
  add_common(report_cmd);
  report_cmd->add_option("--report", report.report, "Report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*score_cmd) return RunScore(common, score, out);
    if (*validate_cmd) return RunValidate(common, validate, out);
    if (*retrieve_cmd) return RunRetrieve(common, retrieve, out);
    if (*generate_cmd) return RunGenerate(common, generate, out, err);
    if (*analyze_cmd) return RunAnalyze(common, analyze, out);
    if (*correlate_cmd) return RunCorrelate(common, correlate, out);
    if (*report_cmd) return RunReport(common, report, out);
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const GeneratorError& e) {
    err << "generator error: " << e.what() << "\n";
    return kExitGeneratorFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace flowsim
