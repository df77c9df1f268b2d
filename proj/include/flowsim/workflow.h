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

// Canonical in-memory workflow model: a trigger followed by an ordered,
// possibly nested list of steps. The JSON layout is documented in
// docs/schema.md.

#ifndef FLOWSIM_WORKFLOW_H_
#define FLOWSIM_WORKFLOW_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace flowsim {

using Json = nlohmann::json;

enum class StepKind { kAction, kFlowLogic };

enum class LogicKind {
  kIf,
  kElseIf,
  kElse,
  kForEach,
  kParallel,
  kParallelBranch,
  kTry,
  kCatch,
  kDoUntil,
};

enum class ValueKind { kLiteral, kTableRef, kColumnRef, kDataPill };

std::string_view ToString(StepKind kind);
std::string_view ToString(LogicKind kind);
std::string_view ToString(ValueKind kind);

// Case-insensitive; '-' and ' ' read as '_', and "ELSE_IF", "FOR_EACH",
// "DO_UNTIL" map to the joined spelling. Returns nullopt for unknown names.
std::optional<LogicKind> ParseLogicKind(std::string_view text);
std::optional<ValueKind> ParseValueKind(std::string_view text);

// Reference to an output of an earlier step ("data pill").
struct PillRef {
  std::string source_step_id;
  std::string output_path;

  bool operator==(const PillRef&) const = default;
};

using Scalar = std::variant<std::string, std::int64_t, double, bool>;

struct ConditionClause {
  std::string column;
  std::string op;
  std::variant<Scalar, PillRef> operand;
  // Connective joining this clause to the previous one; ignored on the
  // first clause.
  bool or_with_previous = false;

  bool operator==(const ConditionClause&) const = default;
};

struct Condition {
  std::vector<ConditionClause> clauses;

  bool operator==(const Condition&) const = default;
};

using InputValue = std::variant<Scalar, Condition, PillRef>;

struct StepInput {
  std::string key;
  InputValue value;
  ValueKind value_kind = ValueKind::kLiteral;
  Json extras = Json::object();

  bool operator==(const StepInput&) const = default;
};

inline constexpr std::string_view kTriggerId = "trigger";

struct TriggerStep {
  // Empty for the null trigger.
  std::string trigger_type;
  std::string annotation;
  std::vector<StepInput> inputs;
  Json extras = Json::object();

  bool is_null() const { return trigger_type.empty(); }
  bool operator==(const TriggerStep&) const = default;
};

struct Step {
  std::string id;
  std::string name;
  StepKind kind = StepKind::kAction;
  std::optional<LogicKind> logic_kind;
  std::string annotation;
  std::vector<StepInput> inputs;
  std::vector<Step> children;
  Json extras = Json::object();

  bool is_logic(LogicKind k) const {
    return kind == StepKind::kFlowLogic && logic_kind == k;
  }
  bool operator==(const Step&) const = default;
};

struct Workflow {
  TriggerStep trigger;
  std::vector<Step> steps;
  // Top-level string fields other than trigger/steps (name, description,
  // vendor keys). Non-string unknown fields live in `extras`.
  std::map<std::string, std::string> metadata;
  Json extras = Json::object();

  bool operator==(const Workflow&) const = default;
};

struct ParseOptions {
  // Lenient parsing keeps structurally broken generations (dangling pills,
  // duplicate ids, actions with children, missing trigger) so that they can
  // be validated and scored instead of rejected.
  bool lenient = false;
};

// Throws SyntaxError on malformed JSON and SchemaError (with a JSON path) on
// invariant violations.
Workflow ParseWorkflow(std::string_view document, ParseOptions options = {});
Workflow WorkflowFromJson(const Json& document, ParseOptions options = {});

// Canonical form: sorted object keys, two-space indentation, trailing newline
// omitted.
std::string SerializeWorkflow(const Workflow& workflow);
Json WorkflowToJson(const Workflow& workflow);

Json InputValueToJson(const InputValue& value);
StepInput StepInputFromJson(const Json& node, const std::string& path);
Json StepInputToJson(const StepInput& input);

// One pre-order visit. `step` is null for the trigger entry.
struct WalkEntry {
  const Step* step = nullptr;
  std::string_view id;
  int depth = 0;
  std::string_view parent_id;

  bool is_trigger() const { return step == nullptr; }
};

// Trigger first (depth 0), then steps in stored order; top-level steps have
// depth 1.
std::vector<WalkEntry> Walk(const Workflow& workflow);

std::size_t StepCount(const Workflow& workflow);

// Finds a step anywhere in the tree.
const Step* FindStep(const Workflow& workflow, std::string_view id);
Step* FindStep(Workflow& workflow, std::string_view id);

// All pill references held by a set of inputs, including condition operands.
std::vector<PillRef> CollectPills(const std::vector<StepInput>& inputs);

// Name of the instruction family for an input: "condition" for condition
// values, otherwise the value kind.
std::string_view InputTypeName(const StepInput& input);

}  // namespace flowsim

#endif  // FLOWSIM_WORKFLOW_H_
