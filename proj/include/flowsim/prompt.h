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

#ifndef FLOWSIM_PROMPT_H_
#define FLOWSIM_PROMPT_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "flowsim/workflow.h"

namespace flowsim {

enum class SectionName {
  kContext,
  kTaskDefinition,
  kInputs,
  kGuidelines,
  kConstraints,
  kOutputFormat,
};

// "Context", "Task definition", ..., "Output format".
std::string_view ToString(SectionName name);
std::optional<SectionName> ParseSectionName(std::string_view text);

struct PromptSection {
  SectionName name;
  std::string body;
};

using Bindings = std::map<std::string, std::string, std::less<>>;

// A prompt made of the six named sections. Bodies reference bindings as
// {{name}}; names are [a-z0-9_]+.
class PromptTemplate {
 public:
  PromptTemplate() = default;

  // Throws SchemaError unless each of the six sections appears exactly once.
  PromptTemplate(std::string name, std::vector<PromptSection> sections);

  // {"name": ..., "sections": [{"section": "Context", "body": ...}, ...]}
  static PromptTemplate FromJson(const Json& node);
  static PromptTemplate Load(const std::string& path);

  const std::string& name() const { return name_; }
  const std::vector<PromptSection>& sections() const { return sections_; }
  std::set<std::string> placeholders() const;

 private:
  std::string name_;
  std::vector<PromptSection> sections_;
};

// Sections are emitted in stored order as "## <Section>\n<body>\n\n" with
// every placeholder substituted. Throws UnboundPlaceholder naming every
// placeholder without a binding.
std::string RenderPrompt(const PromptTemplate& prompt, const Bindings& bindings);

// Instruction blocks injected into populateInputs prompts, keyed by input
// type name (literal, table_ref, column_ref, data_pill, condition).
using InstructionTable = std::map<std::string, std::string, std::less<>>;

InstructionTable DefaultInstructions();
InstructionTable InstructionsFromJson(const Json& node);

// Concatenates the blocks for `types` in order, skipping duplicates and
// types without an entry.
std::string SelectInstructions(const InstructionTable& table,
                               const std::vector<std::string>& types);

// Placeholders: requirement, suggestions.
PromptTemplate DefaultCreateFlowTemplate();

// Placeholders: partial_flow, target_step, annotation, suggestions,
// input_type_instructions.
PromptTemplate DefaultPopulateInputsTemplate();

}  // namespace flowsim

#endif  // FLOWSIM_PROMPT_H_
