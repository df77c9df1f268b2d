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

#include "flowsim/workflow.h"

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>

#include "flowsim/errors.h"

namespace flowsim {
namespace {

constexpr std::string_view kLogicNames[] = {
    "IF",  "ELSEIF", "ELSE",  "FOREACH", "PARALLEL", "PARALLEL_BRANCH",
    "TRY", "CATCH",  "DOUNTIL"};

constexpr std::string_view kValueKindNames[] = {"literal", "table_ref",
                                                "column_ref", "data_pill"};

std::string Upper(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == ' ' || c == '-') c = '_';
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string Index(const std::string& path, std::string_view field,
                  std::size_t i) {
  std::string out = path;
  if (!out.empty()) out += '.';
  out += field;
  out += '[';
  out += std::to_string(i);
  out += ']';
  return out;
}

std::string Field(const std::string& path, std::string_view field) {
  return path.empty() ? std::string(field) : path + "." + std::string(field);
}

std::string GetString(const Json& node, const char* key,
                      const std::string& path) {
  auto it = node.find(key);
  if (it == node.end() || it->is_null()) return {};
  if (!it->is_string()) {
    throw SchemaError(Field(path, key), "expected a string");
  }
  return it->get<std::string>();
}

Scalar ScalarFromJson(const Json& node, const std::string& path) {
  if (node.is_string()) return node.get<std::string>();
  if (node.is_boolean()) return node.get<bool>();
  if (node.is_number_integer()) {
    if (node.is_number_unsigned() &&
        node.get<std::uint64_t>() >
            static_cast<std::uint64_t>(INT64_MAX)) {
      return static_cast<double>(node.get<std::uint64_t>());
    }
    return node.get<std::int64_t>();
  }
  if (node.is_number_float()) return node.get<double>();
  throw SchemaError(path, "expected a string, number or boolean");
}

Json ScalarToJson(const Scalar& value) {
  return std::visit([](const auto& v) { return Json(v); }, value);
}

bool IsPillObject(const Json& node) {
  return node.is_object() && node.contains("pill");
}

PillRef PillFromJson(const Json& node, const std::string& path) {
  const Json& pill = node.at("pill");
  if (!pill.is_object()) throw SchemaError(path, "pill must be an object");
  PillRef ref;
  ref.source_step_id = GetString(pill, "step", Field(path, "pill"));
  ref.output_path = GetString(pill, "path", Field(path, "pill"));
  if (ref.source_step_id.empty()) {
    throw SchemaError(Field(path, "pill.step"), "pill without source step");
  }
  return ref;
}

Json PillToJson(const PillRef& ref) {
  return Json{{"pill", {{"step", ref.source_step_id}, {"path", ref.output_path}}}};
}

Condition ConditionFromJson(const Json& node, const std::string& path) {
  const Json& list = node.at("condition");
  const std::string list_path = Field(path, "condition");
  if (!list.is_array() || list.empty()) {
    throw SchemaError(list_path, "condition needs at least one clause");
  }
  Condition condition;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Json& c = list[i];
    const std::string clause_path = list_path + "[" + std::to_string(i) + "]";
    if (!c.is_object()) throw SchemaError(clause_path, "clause must be an object");
    ConditionClause clause;
    clause.column = GetString(c, "column", clause_path);
    clause.op = GetString(c, "operator", clause_path);
    if (clause.column.empty() || clause.op.empty()) {
      throw SchemaError(clause_path, "clause needs a column and an operator");
    }
    auto operand = c.find("operand");
    if (operand == c.end() || operand->is_null()) {
      clause.operand = Scalar(std::string());
    } else if (IsPillObject(*operand)) {
      clause.operand = PillFromJson(*operand, Field(clause_path, "operand"));
    } else {
      clause.operand = ScalarFromJson(*operand, Field(clause_path, "operand"));
    }
    const std::string join = Upper(GetString(c, "join", clause_path));
    if (!join.empty() && join != "AND" && join != "OR") {
      throw SchemaError(Field(clause_path, "join"), "join must be AND or OR");
    }
    clause.or_with_previous = (i > 0 && join == "OR");
    condition.clauses.push_back(std::move(clause));
  }
  return condition;
}

Json ConditionToJson(const Condition& condition) {
  Json list = Json::array();
  for (std::size_t i = 0; i < condition.clauses.size(); ++i) {
    const ConditionClause& clause = condition.clauses[i];
    Json c = {{"column", clause.column}, {"operator", clause.op}};
    if (const auto* pill = std::get_if<PillRef>(&clause.operand)) {
      c["operand"] = PillToJson(*pill);
    } else {
      c["operand"] = ScalarToJson(std::get<Scalar>(clause.operand));
    }
    if (i > 0) c["join"] = clause.or_with_previous ? "OR" : "AND";
    list.push_back(std::move(c));
  }
  return Json{{"condition", std::move(list)}};
}

InputValue InputValueFromJson(const Json& node, const std::string& path) {
  if (IsPillObject(node)) return PillFromJson(node, path);
  if (node.is_object() && node.contains("condition")) {
    return ConditionFromJson(node, path);
  }
  if (node.is_null()) return Scalar(std::string());
  return ScalarFromJson(node, path);
}

std::vector<StepInput> InputsFromJson(const Json& owner,
                                      const std::string& path,
                                      const ParseOptions& options) {
  std::vector<StepInput> inputs;
  auto it = owner.find("inputs");
  if (it == owner.end() || it->is_null()) return inputs;
  const std::string list_path = Field(path, "inputs");
  if (!it->is_array()) throw SchemaError(list_path, "inputs must be an array");
  std::set<std::string> keys;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const std::string input_path = list_path + "[" + std::to_string(i) + "]";
    StepInput input = StepInputFromJson((*it)[i], input_path);
    if (!keys.insert(input.key).second && !options.lenient) {
      throw SchemaError(input_path, "duplicate input key '" + input.key + "'");
    }
    inputs.push_back(std::move(input));
  }
  return inputs;
}

Json ExtrasFrom(const Json& node, std::initializer_list<std::string_view> known) {
  Json extras = Json::object();
  for (auto it = node.begin(); it != node.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      extras[it.key()] = it.value();
    }
  }
  return extras;
}

void MergeExtras(Json& out, const Json& extras) {
  if (!extras.is_object()) return;
  for (auto it = extras.begin(); it != extras.end(); ++it) {
    if (!out.contains(it.key())) out[it.key()] = it.value();
  }
}

bool AnnotationOptional(const Step& step) {
  return step.is_logic(LogicKind::kElse) ||
         step.is_logic(LogicKind::kParallelBranch);
}

Step StepFromJson(const Json& node, const std::string& path,
                  const ParseOptions& options) {
  if (!node.is_object()) throw SchemaError(path, "step must be an object");
  Step step;
  step.id = GetString(node, "id", path);
  step.name = GetString(node, "name", path);
  step.annotation = GetString(node, "annotation", path);

  const std::string kind = GetString(node, "kind", path);
  const std::string logic = GetString(node, "logic", path);
  if (!logic.empty()) {
    step.logic_kind = ParseLogicKind(logic);
    if (!step.logic_kind) {
      throw SchemaError(Field(path, "logic"), "unknown flow logic '" + logic + "'");
    }
  }
  if (kind == "flowlogic") {
    step.kind = StepKind::kFlowLogic;
  } else if (kind == "action") {
    step.kind = StepKind::kAction;
  } else if (kind.empty()) {
    step.kind = step.logic_kind ? StepKind::kFlowLogic : StepKind::kAction;
  } else {
    throw SchemaError(Field(path, "kind"), "unknown step kind '" + kind + "'");
  }

  if (step.kind == StepKind::kFlowLogic && !step.logic_kind) {
    // A bare logic name in "name" is common in generated outlines.
    if (auto parsed = ParseLogicKind(step.name); parsed && options.lenient) {
      step.logic_kind = parsed;
    } else {
      throw SchemaError(Field(path, "logic"), "flowlogic step without logic");
    }
  }
  if (step.kind == StepKind::kAction && step.logic_kind) {
    if (!options.lenient) {
      throw SchemaError(Field(path, "logic"), "action step cannot carry logic");
    }
    step.kind = StepKind::kFlowLogic;
  }
  if (step.kind == StepKind::kFlowLogic && step.name.empty()) {
    step.name = std::string(ToString(*step.logic_kind));
  }
  if (step.kind == StepKind::kAction && step.name.empty() && !options.lenient) {
    throw SchemaError(Field(path, "name"), "action step without name");
  }
  if (!options.lenient && step.annotation.empty() && !AnnotationOptional(step)) {
    throw SchemaError(Field(path, "annotation"), "missing annotation");
  }

  step.inputs = InputsFromJson(node, path, options);

  if (auto children = node.find("children");
      children != node.end() && !children->is_null()) {
    if (!children->is_array()) {
      throw SchemaError(Field(path, "children"), "children must be an array");
    }
    if (step.kind == StepKind::kAction && !children->empty() &&
        !options.lenient) {
      throw SchemaError(Field(path, "children"), "action step cannot have children");
    }
    for (std::size_t i = 0; i < children->size(); ++i) {
      step.children.push_back(
          StepFromJson((*children)[i], Index(path, "children", i), options));
    }
  }
  step.extras = ExtrasFrom(node, {"id", "name", "kind", "logic", "annotation",
                                  "inputs", "children"});
  return step;
}

Json StepToJson(const Step& step) {
  Json out = {{"id", step.id},
              {"name", step.name},
              {"kind", ToString(step.kind)},
              {"annotation", step.annotation}};
  if (step.logic_kind) out["logic"] = ToString(*step.logic_kind);
  Json inputs = Json::array();
  for (const StepInput& input : step.inputs) inputs.push_back(StepInputToJson(input));
  out["inputs"] = std::move(inputs);
  if (step.kind == StepKind::kFlowLogic || !step.children.empty()) {
    Json children = Json::array();
    for (const Step& child : step.children) children.push_back(StepToJson(child));
    out["children"] = std::move(children);
  }
  MergeExtras(out, step.extras);
  return out;
}

TriggerStep TriggerFromJson(const Json& node, const ParseOptions& options) {
  const std::string path = "trigger";
  if (!node.is_object()) throw SchemaError(path, "trigger must be an object");
  TriggerStep trigger;
  auto type = node.find("type");
  if (type == node.end()) {
    if (!options.lenient) throw SchemaError(Field(path, "type"), "missing trigger type");
  } else if (!type->is_null()) {
    if (!type->is_string()) throw SchemaError(Field(path, "type"), "expected a string");
    trigger.trigger_type = type->get<std::string>();
    if (trigger.trigger_type.empty() && !options.lenient) {
      throw SchemaError(Field(path, "type"),
                        "empty trigger type; use null for the null trigger");
    }
  }
  trigger.annotation = GetString(node, "annotation", path);
  trigger.inputs = InputsFromJson(node, path, options);
  trigger.extras = ExtrasFrom(node, {"type", "annotation", "inputs"});
  return trigger;
}

void CollectIds(std::vector<Step>& steps, std::vector<Step*>& out) {
  for (Step& step : steps) {
    out.push_back(&step);
    CollectIds(step.children, out);
  }
}

// Assigns "step_<n>" ids to steps without one, skipping ids already taken.
void AssignMissingIds(Workflow& workflow) {
  std::vector<Step*> all;
  CollectIds(workflow.steps, all);
  std::unordered_set<std::string> taken = {std::string(kTriggerId)};
  for (const Step* s : all) {
    if (!s->id.empty()) taken.insert(s->id);
  }
  int next = 1;
  for (Step* s : all) {
    if (!s->id.empty()) continue;
    std::string candidate;
    do {
      candidate = "step_" + std::to_string(next++);
    } while (taken.count(candidate) != 0);
    s->id = candidate;
    taken.insert(candidate);
  }
}

void CheckReferences(const std::vector<Step>& steps, const std::string& path,
                     std::unordered_set<std::string>& seen) {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Step& step = steps[i];
    const std::string step_path =
        path.empty() ? "steps[" + std::to_string(i) + "]"
                     : Index(path, "children", i);
    if (!seen.insert(step.id).second) {
      throw SchemaError(Field(step_path, "id"), "duplicate step id '" + step.id + "'");
    }
    for (std::size_t j = 0; j < step.inputs.size(); ++j) {
      for (const PillRef& pill : CollectPills({step.inputs[j]})) {
        if (seen.count(pill.source_step_id) == 0 ||
            pill.source_step_id == step.id) {
          throw SchemaError(Index(step_path, "inputs", j),
                            "pill references '" + pill.source_step_id +
                                "', which does not precede this step");
        }
      }
    }
    CheckReferences(step.children, step_path, seen);
  }
}

void WalkSteps(const std::vector<Step>& steps, int depth,
               std::string_view parent, std::vector<WalkEntry>& out) {
  for (const Step& step : steps) {
    out.push_back(WalkEntry{&step, step.id, depth, parent});
    WalkSteps(step.children, depth + 1, step.id, out);
  }
}

template <typename StepT>
StepT* FindIn(std::vector<StepT>& steps, std::string_view id) {
  for (StepT& step : steps) {
    if (step.id == id) return &step;
    if (StepT* found = FindIn(step.children, id)) return found;
  }
  return nullptr;
}

template <typename StepT>
const StepT* FindIn(const std::vector<StepT>& steps, std::string_view id) {
  for (const StepT& step : steps) {
    if (step.id == id) return &step;
    if (const StepT* found = FindIn(step.children, id)) return found;
  }
  return nullptr;
}

}  // namespace

std::string_view ToString(StepKind kind) {
  return kind == StepKind::kAction ? "action" : "flowlogic";
}

std::string_view ToString(LogicKind kind) {
  return kLogicNames[static_cast<int>(kind)];
}

std::string_view ToString(ValueKind kind) {
  return kValueKindNames[static_cast<int>(kind)];
}

std::optional<LogicKind> ParseLogicKind(std::string_view text) {
  std::string upper = Upper(text);
  if (upper == "ELSE_IF") upper = "ELSEIF";
  if (upper == "FOR_EACH") upper = "FOREACH";
  if (upper == "DO_UNTIL") upper = "DOUNTIL";
  for (std::size_t i = 0; i < std::size(kLogicNames); ++i) {
    if (upper == kLogicNames[i]) return static_cast<LogicKind>(i);
  }
  return std::nullopt;
}

std::optional<ValueKind> ParseValueKind(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kValueKindNames); ++i) {
    if (text == kValueKindNames[i]) return static_cast<ValueKind>(i);
  }
  return std::nullopt;
}

Json InputValueToJson(const InputValue& value) {
  if (const auto* pill = std::get_if<PillRef>(&value)) return PillToJson(*pill);
  if (const auto* condition = std::get_if<Condition>(&value)) {
    return ConditionToJson(*condition);
  }
  return ScalarToJson(std::get<Scalar>(value));
}

StepInput StepInputFromJson(const Json& node, const std::string& path) {
  if (!node.is_object()) throw SchemaError(path, "input must be an object");
  StepInput input;
  input.key = GetString(node, "key", path);
  if (input.key.empty()) throw SchemaError(Field(path, "key"), "missing input key");
  auto value = node.find("value");
  input.value = value == node.end() ? InputValue(Scalar(std::string()))
                                    : InputValueFromJson(*value, Field(path, "value"));
  const bool is_pill = std::holds_alternative<PillRef>(input.value);
  const std::string kind = GetString(node, "kind", path);
  if (kind.empty()) {
    input.value_kind = is_pill ? ValueKind::kDataPill : ValueKind::kLiteral;
  } else if (auto parsed = ParseValueKind(kind)) {
    input.value_kind = *parsed;
  } else {
    throw SchemaError(Field(path, "kind"), "unknown value kind '" + kind + "'");
  }
  if ((input.value_kind == ValueKind::kDataPill) != is_pill) {
    throw SchemaError(path, "data_pill kind requires a pill value and vice versa");
  }
  if ((input.value_kind == ValueKind::kTableRef ||
       input.value_kind == ValueKind::kColumnRef)) {
    const auto* scalar = std::get_if<Scalar>(&input.value);
    if (scalar == nullptr || !std::holds_alternative<std::string>(*scalar)) {
      throw SchemaError(Field(path, "value"), "table/column refs must be strings");
    }
  }
  input.extras = ExtrasFrom(node, {"key", "kind", "value"});
  return input;
}

Json StepInputToJson(const StepInput& input) {
  Json out = {{"key", input.key},
              {"kind", ToString(input.value_kind)},
              {"value", InputValueToJson(input.value)}};
  MergeExtras(out, input.extras);
  return out;
}

Workflow WorkflowFromJson(const Json& document, ParseOptions options) {
  if (!document.is_object()) throw SchemaError("", "workflow must be a JSON object");
  Workflow workflow;
  auto trigger = document.find("trigger");
  if (trigger == document.end() || trigger->is_null()) {
    if (!options.lenient) throw SchemaError("trigger", "missing trigger");
  } else {
    workflow.trigger = TriggerFromJson(*trigger, options);
  }

  auto steps = document.find("steps");
  if (steps == document.end() || steps->is_null()) {
    if (!options.lenient) throw SchemaError("steps", "missing steps array");
  } else {
    if (!steps->is_array()) throw SchemaError("steps", "steps must be an array");
    for (std::size_t i = 0; i < steps->size(); ++i) {
      workflow.steps.push_back(
          StepFromJson((*steps)[i], "steps[" + std::to_string(i) + "]", options));
    }
  }

  for (auto it = document.begin(); it != document.end(); ++it) {
    if (it.key() == "trigger" || it.key() == "steps") continue;
    if (it->is_string()) {
      workflow.metadata[it.key()] = it->get<std::string>();
    } else {
      workflow.extras[it.key()] = it.value();
    }
  }

  AssignMissingIds(workflow);
  if (!options.lenient) {
    std::unordered_set<std::string> seen = {std::string(kTriggerId)};
    for (std::size_t j = 0; j < workflow.trigger.inputs.size(); ++j) {
      if (!CollectPills({workflow.trigger.inputs[j]}).empty()) {
        throw SchemaError("trigger.inputs[" + std::to_string(j) + "]",
                          "trigger inputs cannot reference steps");
      }
    }
    CheckReferences(workflow.steps, "", seen);
  }
  return workflow;
}

Workflow ParseWorkflow(std::string_view document, ParseOptions options) {
  Json parsed;
  try {
    parsed = Json::parse(document);
  } catch (const Json::parse_error& e) {
    throw SyntaxError(e.what());
  }
  return WorkflowFromJson(parsed, options);
}

Json WorkflowToJson(const Workflow& workflow) {
  Json trigger = {{"annotation", workflow.trigger.annotation}};
  trigger["type"] = workflow.trigger.is_null() ? Json(nullptr)
                                               : Json(workflow.trigger.trigger_type);
  Json trigger_inputs = Json::array();
  for (const StepInput& input : workflow.trigger.inputs) {
    trigger_inputs.push_back(StepInputToJson(input));
  }
  trigger["inputs"] = std::move(trigger_inputs);
  MergeExtras(trigger, workflow.trigger.extras);

  Json steps = Json::array();
  for (const Step& step : workflow.steps) steps.push_back(StepToJson(step));

  Json out = {{"trigger", std::move(trigger)}, {"steps", std::move(steps)}};
  for (const auto& [key, value] : workflow.metadata) out[key] = value;
  MergeExtras(out, workflow.extras);
  return out;
}

std::string SerializeWorkflow(const Workflow& workflow) {
  return WorkflowToJson(workflow).dump(2);
}

std::vector<WalkEntry> Walk(const Workflow& workflow) {
  std::vector<WalkEntry> out;
  out.push_back(WalkEntry{nullptr, kTriggerId, 0, {}});
  WalkSteps(workflow.steps, 1, kTriggerId, out);
  return out;
}

std::size_t StepCount(const Workflow& workflow) {
  return Walk(workflow).size() - 1;
}

const Step* FindStep(const Workflow& workflow, std::string_view id) {
  return FindIn(workflow.steps, id);
}

Step* FindStep(Workflow& workflow, std::string_view id) {
  return FindIn(workflow.steps, id);
}

std::vector<PillRef> CollectPills(const std::vector<StepInput>& inputs) {
  std::vector<PillRef> pills;
  for (const StepInput& input : inputs) {
    if (const auto* pill = std::get_if<PillRef>(&input.value)) {
      pills.push_back(*pill);
    } else if (const auto* condition = std::get_if<Condition>(&input.value)) {
      for (const ConditionClause& clause : condition->clauses) {
        if (const auto* operand = std::get_if<PillRef>(&clause.operand)) {
          pills.push_back(*operand);
        }
      }
    }
  }
  return pills;
}

std::string_view InputTypeName(const StepInput& input) {
  if (std::holds_alternative<Condition>(input.value)) return "condition";
  return ToString(input.value_kind);
}

}  // namespace flowsim
