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

// Batch evaluation: dataset loading, per-sample FlowSim and structure
// checks, gated scores and grouped aggregates, and report emission.

#ifndef FLOWSIM_EVAL_H_
#define FLOWSIM_EVAL_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowsim/structure.h"
#include "flowsim/tree_metric.h"
#include "flowsim/workflow.h"

namespace flowsim {

struct EvalSample {
  std::string id;
  std::string requirement;
  Workflow expected;
  std::optional<Workflow> generated;
  std::string split_tag;
};

enum class DatasetFormat {
  // One sample object per line.
  kJsonl,
  // One sample object per *.json file, read in file name order.
  kDirectory,
};

// Sample object: {"id", "requirement", "expected": <workflow>,
// "generated": <workflow>?, "split_tag"}. `expected` is parsed strictly,
// `generated` leniently. Throws IoError, SyntaxError, SchemaError (path
// prefixed with the line or file) and DuplicateId.
std::vector<EvalSample> LoadDataset(const std::string& path, DatasetFormat format);
std::vector<EvalSample> ParseDatasetJsonl(std::string_view text);
EvalSample SampleFromJson(const Json& node);
Json ToJson(const EvalSample& sample);

// One JSON object per line, samples in the given order.
std::string DatasetToJsonl(std::span<const EvalSample> samples);

struct EvalConfig {
  FlowSimOptions flow_sim;
  RuleSet rules = DefaultRuleSet();
  // Off: gated scores equal raw scores.
  bool gate = true;
  // Worker threads for per-sample scoring; results do not depend on it.
  int threads = 1;
};

struct SampleRecord {
  std::string id;
  std::string split_tag;
  FlowSimScore flow_sim_outline;
  FlowSimScore flow_sim_full;
  StructureReport structure;
  FlowSimScore gated_outline;
  FlowSimScore gated_full;

  bool operator==(const SampleRecord&) const = default;
};

struct Aggregates {
  std::size_t n = 0;
  double mean_outline = 0.0;
  double mean_full = 0.0;
  double structure_error_rate = 0.0;
  double gated_mean_outline = 0.0;
  double gated_mean_full = 0.0;

  bool operator==(const Aggregates&) const = default;
};

inline constexpr std::string_view kAllSamples = "ALL";

struct EvalReport {
  bool gate = true;
  std::string normalizer = "max";
  bool include_annotations = false;
  std::vector<std::string> rules;
  // Sorted by id.
  std::vector<SampleRecord> records;
  // kAllSamples plus one entry per split tag.
  std::map<std::string, Aggregates> aggregates;

  bool operator==(const EvalReport&) const = default;
};

// Means are accumulated in id order, so the result does not depend on the
// order of `records`.
Aggregates ComputeAggregates(std::span<const SampleRecord> records);
std::map<std::string, Aggregates> GroupAggregates(std::span<const SampleRecord> records);

// Throws MissingGenerated listing every sample without a generated workflow.
EvalReport Evaluate(std::span<const EvalSample> samples, const EvalConfig& config);

enum class ReportFormat { kJson, kCsv, kMarkdown };

std::optional<ReportFormat> ParseReportFormat(std::string_view text);

Json ToJson(const EvalReport& report);
EvalReport EvalReportFromJson(const Json& node);

// Deterministic bytes for a given report.
std::string RenderReport(const EvalReport& report, ReportFormat format);
void EmitReport(const EvalReport& report, ReportFormat format, const std::string& path);

// Fixed-point text used by the CSV and markdown renderers.
std::string FormatNumber(double value, int decimals);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace flowsim

#endif  // FLOWSIM_EVAL_H_
