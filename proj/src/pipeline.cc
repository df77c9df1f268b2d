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

#include "flowsim/pipeline.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "flowsim/errors.h"

namespace flowsim {
namespace {

std::string RenderStepSuggestions(const SuggestionSet& suggestions,
                                  const StepCatalog& catalog) {
  std::string out;
  for (const Suggestion& s : suggestions.steps) {
    out += "- " + s.name;
    if (const StepEntry* entry = catalog.FindStep(s.name);
        entry != nullptr && !entry->description.empty()) {
      out += ": " + entry->description;
    }
    out += '\n';
  }
  if (!out.empty()) out.pop_back();
  return out;
}

std::string RenderArtifactSuggestions(const SuggestionSet& suggestions) {
  auto join = [](const std::vector<Suggestion>& list, bool with_parent, char sep) {
    std::string out;
    for (const Suggestion& s : list) {
      if (!out.empty()) out += ", ";
      out += with_parent ? s.parent + sep + s.name : s.name;
    }
    return out.empty() ? std::string("(none)") : out;
  };
  return "Tables: " + join(suggestions.tables, false, '.') +
         "\nColumns: " + join(suggestions.columns, true, '.') +
         "\nValues: " + join(suggestions.values, true, '=');
}

std::string KeyPrefix(std::string_view requirement, const PipelineOptions& options) {
  return options.sample_key.empty() ? std::string(requirement) : options.sample_key;
}

void StripInputs(std::vector<Step>& steps) {
  for (Step& step : steps) {
    step.inputs.clear();
    StripInputs(step.children);
  }
}

std::vector<std::string> TypeNames(const std::optional<std::vector<InputSpec>>& specs,
                                   const InstructionTable& table) {
  std::vector<std::string> types;
  if (!specs) {
    for (const auto& [type, text] : table) types.push_back(type);
  } else {
    for (const InputSpec& spec : *specs) types.push_back(spec.type);
  }
  return types;
}

std::optional<std::vector<StepInput>> InputsFromResponse(const Json& node) {
  const Json* list = &node;
  if (node.is_object()) {
    auto it = node.find("inputs");
    if (it == node.end()) return std::nullopt;
    list = &*it;
  }
  if (!list->is_array()) return std::nullopt;
  std::vector<StepInput> inputs;
  for (std::size_t i = 0; i < list->size(); ++i) {
    inputs.push_back(StepInputFromJson((*list)[i], "inputs[" + std::to_string(i) + "]"));
  }
  return inputs;
}

}  // namespace

std::size_t EstimatePromptTokens(std::string_view prompt) {
  std::istringstream in{std::string(prompt)};
  std::size_t words = 0;
  std::string word;
  while (in >> word) ++words;
  return static_cast<std::size_t>(std::llround(static_cast<double>(words) * 1.3));
}

std::optional<Json> ExtractJson(std::string_view raw) {
  std::string text(raw);
  if (auto fence = text.find("```"); fence != std::string::npos) {
    auto body = text.find('\n', fence);
    auto close = body == std::string::npos ? std::string::npos : text.find("```", body);
    if (close != std::string::npos) text = text.substr(body + 1, close - body - 1);
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error&) {
  }
  for (std::size_t start = 0; start < text.size(); ++start) {
    if (text[start] != '{' && text[start] != '[') continue;
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{' || c == '[') {
        ++depth;
      } else if (c == '}' || c == ']') {
        if (--depth == 0) {
          try {
            return Json::parse(text.substr(start, i - start + 1));
          } catch (const Json::parse_error&) {
          }
          break;
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<std::vector<InputSpec>> ExpectedInputs(const Step& step,
                                                     const StepCatalog& catalog) {
  if (step.kind == StepKind::kFlowLogic) {
    switch (*step.logic_kind) {
      case LogicKind::kIf:
      case LogicKind::kElseIf:
      case LogicKind::kDoUntil:
        return std::vector<InputSpec>{{"condition", "condition"}};
      case LogicKind::kForEach:
        return std::vector<InputSpec>{{"items", "data_pill"}};
      default:
        return std::vector<InputSpec>{};
    }
  }
  if (const StepEntry* entry = catalog.FindStep(step.name)) return entry->inputs;
  return std::nullopt;
}

std::vector<InputSpec> ExpectedInputs(const TriggerStep& trigger) {
  if (trigger.is_null()) return {};
  return {{"table", "table_ref"}, {"condition", "condition"}};
}

bool AcceptsInputs(const Step& step, const StepCatalog& catalog) {
  const auto specs = ExpectedInputs(step, catalog);
  return !specs || !specs->empty();
}

bool AcceptsInputs(const TriggerStep& trigger) { return !trigger.is_null(); }

std::size_t CallBudget(const Workflow& outline, const StepCatalog& catalog) {
  std::size_t budget = 1;
  for (const WalkEntry& entry : Walk(outline)) {
    const bool inputful = entry.is_trigger() ? AcceptsInputs(outline.trigger)
                                             : AcceptsInputs(*entry.step, catalog);
    if (inputful) ++budget;
  }
  return budget;
}

GenerationTask BuildCreateFlowTask(std::string_view requirement, const StepCatalog& catalog,
                                   const PipelineTemplates& templates,
                                   const PipelineOptions& options) {
  GenerationTask task;
  task.task = TaskKind::kCreateFlow;
  task.requirement = std::string(requirement);
  task.suggestions =
      options.perfect_rag_expected != nullptr
          ? PerfectRag(*options.perfect_rag_expected, catalog, options.step_k, requirement)
          : SuggestSteps(requirement, catalog, options.step_k);
  task.rendered_prompt =
      RenderPrompt(templates.create_flow,
                   {{"requirement", task.requirement},
                    {"suggestions", RenderStepSuggestions(task.suggestions, catalog)}});
  return task;
}

GenerationTask BuildPopulateInputsTask(const Workflow& partial, std::string_view step_id,
                                       const StepCatalog& catalog,
                                       const PipelineTemplates& templates,
                                       const PipelineOptions& options) {
  GenerationTask task;
  task.task = TaskKind::kPopulateInputs;
  task.target_step_id = std::string(step_id);

  std::optional<std::vector<InputSpec>> specs;
  std::string target;
  if (step_id == kTriggerId) {
    task.annotation = partial.trigger.annotation;
    specs = ExpectedInputs(partial.trigger);
    target = "trigger (" + (partial.trigger.is_null() ? std::string("null")
                                                      : partial.trigger.trigger_type) + ")";
  } else {
    const Step* step = FindStep(partial, step_id);
    if (step == nullptr) throw MissingStep("no step '" + std::string(step_id) + "'");
    task.annotation = step->annotation;
    specs = ExpectedInputs(*step, catalog);
    target = "'" + step->id + "' (" + step->name + ")";
  }
  task.suggestions = catalog.artifacts().empty()
                         ? SuggestionSet{task.annotation, options.artifact_k, {}, {}, {}, {}}
                         : SuggestArtifacts(task.annotation, catalog, options.artifact_k);
  task.rendered_prompt = RenderPrompt(
      templates.populate_inputs,
      {{"partial_flow", SerializeWorkflow(partial)},
       {"target_step", target},
       {"annotation", task.annotation},
       {"suggestions", RenderArtifactSuggestions(task.suggestions)},
       {"input_type_instructions",
        SelectInstructions(templates.instructions, TypeNames(specs, templates.instructions))}});
  return task;
}

OutlineResult RunCreateFlow(std::string_view requirement, const StepCatalog& catalog,
                            const PipelineTemplates& templates, Generator& generator,
                            const PipelineOptions& options) {
  const GenerationTask task = BuildCreateFlowTask(requirement, catalog, templates, options);
  OutlineResult result;
  result.call.task = TaskKind::kCreateFlow;
  result.call.prompt_tokens_estimate = EstimatePromptTokens(task.rendered_prompt);
  try {
    result.call.raw_response = generator.Generate(
        {KeyPrefix(requirement, options) + "/createFlow", TaskKind::kCreateFlow,
         task.rendered_prompt});
  } catch (const GeneratorError& e) {
    result.call.error = e.what();
    result.generator_failed = true;
    return result;
  }
  const auto json = ExtractJson(result.call.raw_response);
  if (!json) {
    result.call.error = "no JSON found in response";
    return result;
  }
  try {
    Workflow outline = WorkflowFromJson(*json, ParseOptions{.lenient = true});
    outline.trigger.inputs.clear();
    StripInputs(outline.steps);
    result.outline = std::move(outline);
    result.call.parsed_ok = true;
  } catch (const Error& e) {
    result.call.error = e.what();
  }
  return result;
}

PopulateResult RunPopulateInputs(const Workflow& partial, std::string_view step_id,
                                 const StepCatalog& catalog,
                                 const PipelineTemplates& templates, Generator& generator,
                                 const PipelineOptions& options) {
  PopulateResult result{partial, std::nullopt};
  const bool is_trigger = step_id == kTriggerId;
  Step* step = is_trigger ? nullptr : FindStep(result.workflow, step_id);
  if (!is_trigger && step == nullptr) {
    throw MissingStep("no step '" + std::string(step_id) + "'");
  }
  std::vector<StepInput>& target = is_trigger ? result.workflow.trigger.inputs : step->inputs;
  if (!target.empty()) {
    throw std::invalid_argument("step '" + std::string(step_id) + "' already has inputs");
  }
  const bool inputful = is_trigger ? AcceptsInputs(partial.trigger)
                                   : AcceptsInputs(*step, catalog);
  if (!inputful) return result;

  const GenerationTask task =
      BuildPopulateInputsTask(partial, step_id, catalog, templates, options);
  TraceCall& call = result.call.emplace();
  call.task = TaskKind::kPopulateInputs;
  call.step_id = std::string(step_id);
  call.prompt_tokens_estimate = EstimatePromptTokens(task.rendered_prompt);
  const std::string key_base =
      options.sample_key.empty() ? std::string("flow") : options.sample_key;
  try {
    call.raw_response = generator.Generate(
        {key_base + "/populateInputs/" + std::string(step_id), TaskKind::kPopulateInputs,
         task.rendered_prompt});
  } catch (const GeneratorError& e) {
    call.error = e.what();
    return result;
  }
  const auto json = ExtractJson(call.raw_response);
  if (!json) {
    call.error = "no JSON found in response";
    return result;
  }
  try {
    if (auto inputs = InputsFromResponse(*json)) {
      target = std::move(*inputs);
      call.parsed_ok = true;
    } else {
      call.error = "response has no inputs array";
    }
  } catch (const Error& e) {
    call.error = e.what();
  }
  return result;
}

PipelineResult RunPipeline(std::string_view requirement, const StepCatalog& catalog,
                           const PipelineTemplates& templates, Generator& generator,
                           const PipelineOptions& options) {
  PipelineOptions resolved = options;
  if (resolved.sample_key.empty()) resolved.sample_key = std::string(requirement);

  PipelineResult result;
  OutlineResult outline = RunCreateFlow(requirement, catalog, templates, generator, resolved);
  result.trace.calls.push_back(outline.call);
  if (!outline.call.parsed_ok) {
    result.trace.outline_failed = outline.generator_failed;
    return result;
  }
  result.workflow = std::move(outline.outline);

  const std::size_t budget = CallBudget(result.workflow, catalog);
  std::vector<std::string> ids;
  for (const WalkEntry& entry : Walk(result.workflow)) ids.emplace_back(entry.id);
  for (const std::string& id : ids) {
    if (result.trace.total_calls() >= budget) break;
    PopulateResult populated =
        RunPopulateInputs(result.workflow, id, catalog, templates, generator, resolved);
    result.workflow = std::move(populated.workflow);
    if (populated.call) result.trace.calls.push_back(std::move(*populated.call));
  }
  return result;
}

Json ToJson(const PipelineTrace& trace) {
  Json calls = Json::array();
  for (const TraceCall& call : trace.calls) {
    Json item = {{"task", ToString(call.task)},
                 {"prompt_tokens_estimate", call.prompt_tokens_estimate},
                 {"raw_response", call.raw_response},
                 {"parsed_ok", call.parsed_ok}};
    if (!call.step_id.empty()) item["step_id"] = call.step_id;
    if (!call.error.empty()) item["error"] = call.error;
    calls.push_back(std::move(item));
  }
  return {{"calls", std::move(calls)},
          {"total_calls", trace.total_calls()},
          {"outline_failed", trace.outline_failed}};
}

}  // namespace flowsim
