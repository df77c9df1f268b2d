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

// Structure rules for generated workflows and the zero-score gate for
// workflows that break them.
//
// Built-in rules:
//   R1  ELSE / ELSEIF immediately follows an IF or ELSEIF sibling.
//   R2  PARALLEL has at least two branches.
//   R3  CATCH immediately follows a TRY, and every TRY is followed by a CATCH.
//   R4  FOREACH has a non-empty body.
//   R5  FOREACH iterates over records produced by a preceding records step
//       (look_up_records and friends). Warning; off by default.
//   R6  Every data pill resolves to a step earlier in execution order.
//   R7  Child arity: actions have no children, PARALLEL holds only
//       PARALLEL_BRANCH children, PARALLEL_BRANCH sits directly under
//       PARALLEL, and IF/ELSEIF/ELSE/TRY/CATCH/DOUNTIL/PARALLEL_BRANCH have a
//       body.

#ifndef FLOWSIM_STRUCTURE_H_
#define FLOWSIM_STRUCTURE_H_

#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "flowsim/tree_metric.h"
#include "flowsim/workflow.h"

namespace flowsim {

enum class Severity { kError, kWarning };

std::string_view ToString(Severity severity);

struct Violation {
  std::string rule_id;
  std::string step_id;
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct RuleContext {
  // Step names whose output is a record set that FOREACH can iterate (R5).
  std::set<std::string> records_steps = {"look_up_records"};
  // Any step name starting with one of these prefixes also produces records.
  std::vector<std::string> records_prefixes = {"look_up_"};
};

struct StructureRule {
  std::string id;
  std::string description;
  Severity severity = Severity::kError;
  std::function<void(const Workflow&, const RuleContext&,
                     std::vector<Violation>&)>
      check;
};

// The built-in rules R1-R7 in id order, with default severities.
const std::vector<StructureRule>& BuiltinRules();

struct RuleSet {
  std::vector<StructureRule> rules;
  RuleContext context;
};

// R1-R4, R6, R7 as errors; R5 disabled.
RuleSet DefaultRuleSet();

// The single rule named in the original evaluation: ELSE without IF.
RuleSet MinimalRuleSet();

// Config file layout:
//   {"rules": ["R1", ...], "severity": {"R5": "warning"},
//    "records_steps": ["look_up_records"]}
// "rules" omitted means the defaults. Throws SchemaError on unknown ids.
RuleSet RuleSetFromJson(const Json& config);
RuleSet LoadRuleSet(const std::string& path);

struct StructureReport {
  std::string workflow_id;
  // Error-severity findings. Non-empty exactly when the workflow is broken.
  std::vector<Violation> violations;
  std::vector<Violation> warnings;

  bool has_errors() const { return !violations.empty(); }
  bool operator==(const StructureReport&) const = default;
};

// Findings are ordered by the offending step's position in walk order, then
// by rule id.
StructureReport ValidateStructure(const Workflow& workflow,
                                  const RuleSet& rules,
                                  std::string workflow_id = {});

// Fraction of reports with at least one error. Throws EmptyInput.
double StructureErrorRate(std::span<const StructureReport> reports);

struct ScoredSample {
  std::string id;
  FlowSimScore outline;
  FlowSimScore full;

  bool operator==(const ScoredSample&) const = default;
};

// Zeroes both modes for every sample whose report has errors. Reports are
// aligned with samples by position and must carry the same ids; otherwise
// throws IdMismatch.
std::vector<ScoredSample> ApplyStructureGate(
    std::span<const ScoredSample> samples,
    std::span<const StructureReport> reports);

Json ToJson(const StructureReport& report);
StructureReport StructureReportFromJson(const Json& node);

}  // namespace flowsim

#endif  // FLOWSIM_STRUCTURE_H_
