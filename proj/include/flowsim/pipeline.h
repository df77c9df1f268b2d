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

// Two-stage workflow generation.
//
// Stage 1 (createFlow) asks the generator for an outline: trigger, step
// names, order and per-step annotations. Stage 2 (populateInputs) visits the
// trigger and every step in walk order and, for each one that accepts inputs,
// retrieves artifacts with the step's annotation as the query and asks the
// generator for that step's inputs. A workflow with N inputful steps
// (trigger included) therefore costs at most N + 1 generator calls.

#ifndef FLOWSIM_PIPELINE_H_
#define FLOWSIM_PIPELINE_H_

#include <optional>
#include <string>
#include <vector>

#include "flowsim/generator.h"
#include "flowsim/prompt.h"
#include "flowsim/retrieval.h"
#include "flowsim/workflow.h"

namespace flowsim {

struct GenerationTask {
  TaskKind task = TaskKind::kCreateFlow;
  std::string requirement;
  // populateInputs only.
  std::string target_step_id;
  std::string annotation;
  SuggestionSet suggestions;
  std::string rendered_prompt;
};

struct TraceCall {
  TaskKind task = TaskKind::kCreateFlow;
  // Empty for createFlow.
  std::string step_id;
  std::size_t prompt_tokens_estimate = 0;
  std::string raw_response;
  bool parsed_ok = false;
  // Generator or parse failure, if any.
  std::string error;

  bool operator==(const TraceCall&) const = default;
};

struct PipelineTrace {
  std::vector<TraceCall> calls;
  // The outline call failed at the generator; the sample has no workflow.
  bool outline_failed = false;

  std::size_t total_calls() const { return calls.size(); }
  bool operator==(const PipelineTrace&) const = default;
};

struct PipelineTemplates {
  PromptTemplate create_flow = DefaultCreateFlowTemplate();
  PromptTemplate populate_inputs = DefaultPopulateInputsTemplate();
  InstructionTable instructions = DefaultInstructions();
};

struct PipelineOptions {
  // Prefix of generator request keys. RunCreateFlow and RunPipeline fall
  // back to the requirement text, a standalone RunPopulateInputs to "flow".
  std::string sample_key;
  std::size_t step_k = kDefaultStepK;
  std::size_t artifact_k = kDefaultArtifactK;
  // When set, stage 1 suggestions come from PerfectRag on this workflow.
  const Workflow* perfect_rag_expected = nullptr;
};

// Whitespace-separated words times 1.3, rounded.
std::size_t EstimatePromptTokens(std::string_view prompt);

// Best-effort JSON extraction from model output: strips code fences and
// surrounding prose, then tries every balanced {...} or [...] span.
std::optional<Json> ExtractJson(std::string_view raw);

// Input types the step expects, in declaration order. Flow logic: IF, ELSEIF
// and DOUNTIL take a condition, FOREACH takes an items pill, the rest take
// nothing. Actions use their catalog entry; unknown actions return nullopt.
std::optional<std::vector<InputSpec>> ExpectedInputs(const Step& step,
                                                     const StepCatalog& catalog);
std::vector<InputSpec> ExpectedInputs(const TriggerStep& trigger);

bool AcceptsInputs(const Step& step, const StepCatalog& catalog);
bool AcceptsInputs(const TriggerStep& trigger);

// Upper bound on calls for an outline: 1 + number of inputful entries.
std::size_t CallBudget(const Workflow& outline, const StepCatalog& catalog);

GenerationTask BuildCreateFlowTask(std::string_view requirement, const StepCatalog& catalog,
                                   const PipelineTemplates& templates,
                                   const PipelineOptions& options = {});

GenerationTask BuildPopulateInputsTask(const Workflow& partial, std::string_view step_id,
                                       const StepCatalog& catalog,
                                       const PipelineTemplates& templates,
                                       const PipelineOptions& options = {});

struct OutlineResult {
  Workflow outline;
  TraceCall call;
  // The generator itself failed (as opposed to an unparseable response).
  bool generator_failed = false;
};

// Never throws for generator or parse failures; they are recorded in the
// trace entry and produce an empty outline (null trigger, no steps).
OutlineResult RunCreateFlow(std::string_view requirement, const StepCatalog& catalog,
                            const PipelineTemplates& templates, Generator& generator,
                            const PipelineOptions& options = {});

struct PopulateResult {
  Workflow workflow;
  // Empty when the step accepts no inputs and no call was made.
  std::optional<TraceCall> call;
};

// `step_id` may be "trigger". Throws MissingStep for unknown ids and
// std::invalid_argument when the step already has inputs. Only the target
// step's inputs change.
PopulateResult RunPopulateInputs(const Workflow& partial, std::string_view step_id,
                                 const StepCatalog& catalog,
                                 const PipelineTemplates& templates, Generator& generator,
                                 const PipelineOptions& options = {});

struct PipelineResult {
  Workflow workflow;
  PipelineTrace trace;
};

PipelineResult RunPipeline(std::string_view requirement, const StepCatalog& catalog,
                           const PipelineTemplates& templates, Generator& generator,
                           const PipelineOptions& options = {});

Json ToJson(const PipelineTrace& trace);

}  // namespace flowsim

#endif  // FLOWSIM_PIPELINE_H_
