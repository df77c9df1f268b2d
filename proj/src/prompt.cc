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

#include "flowsim/prompt.h"

#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "flowsim/errors.h"

namespace flowsim {
namespace {

constexpr std::array<std::string_view, 6> kSectionTitles = {
    "Context", "Task definition", "Inputs", "Guidelines", "Constraints",
    "Output format"};

bool IsPlaceholderChar(char c) {
  return std::islower(static_cast<unsigned char>(c)) ||
         std::isdigit(static_cast<unsigned char>(c)) || c == '_';
}

// Calls fn(start, end, name) for every {{name}} occurrence.
template <typename Fn>
void ScanPlaceholders(std::string_view body, Fn&& fn) {
  std::size_t pos = 0;
  while ((pos = body.find("{{", pos)) != std::string_view::npos) {
    const std::size_t close = body.find("}}", pos + 2);
    if (close == std::string_view::npos) return;
    const std::string_view name = body.substr(pos + 2, close - pos - 2);
    bool valid = !name.empty();
    for (char c : name) valid = valid && IsPlaceholderChar(c);
    if (valid) {
      fn(pos, close + 2, name);
      pos = close + 2;
    } else {
      pos += 2;
    }
  }
}

}  // namespace

std::string_view ToString(SectionName name) {
  return kSectionTitles[static_cast<int>(name)];
}

std::optional<SectionName> ParseSectionName(std::string_view text) {
  auto normalize = [](std::string_view s) {
    std::string out;
    for (char c : s) {
      if (std::isalnum(static_cast<unsigned char>(c))) {
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      }
    }
    return out;
  };
  const std::string wanted = normalize(text);
  for (std::size_t i = 0; i < kSectionTitles.size(); ++i) {
    if (normalize(kSectionTitles[i]) == wanted) return static_cast<SectionName>(i);
  }
  return std::nullopt;
}

PromptTemplate::PromptTemplate(std::string name, std::vector<PromptSection> sections)
    : name_(std::move(name)), sections_(std::move(sections)) {
  std::array<int, 6> seen{};
  for (const PromptSection& section : sections_) ++seen[static_cast<int>(section.name)];
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i] != 1) {
      throw SchemaError("sections", "template '" + name_ + "' needs exactly one '" +
                                        std::string(kSectionTitles[i]) + "' section");
    }
  }
}

PromptTemplate PromptTemplate::FromJson(const Json& node) {
  std::vector<PromptSection> sections;
  const Json& list = node.at("sections");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string title = list[i].at("section").get<std::string>();
    auto name = ParseSectionName(title);
    if (!name) {
      throw SchemaError("sections[" + std::to_string(i) + "]",
                        "unknown section '" + title + "'");
    }
    sections.push_back({*name, list[i].at("body").get<std::string>()});
  }
  return PromptTemplate(node.value("name", ""), std::move(sections));
}

PromptTemplate PromptTemplate::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open template " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return FromJson(Json::parse(buffer.str()));
  } catch (const Json::exception& e) {
    throw SyntaxError(path + ": " + e.what());
  }
}

std::set<std::string> PromptTemplate::placeholders() const {
  std::set<std::string> names;
  for (const PromptSection& section : sections_) {
    ScanPlaceholders(section.body, [&](std::size_t, std::size_t, std::string_view name) {
      names.emplace(name);
    });
  }
  return names;
}

std::string RenderPrompt(const PromptTemplate& prompt, const Bindings& bindings) {
  std::string missing;
  for (const std::string& name : prompt.placeholders()) {
    if (bindings.find(name) == bindings.end()) {
      if (!missing.empty()) missing += ", ";
      missing += name;
    }
  }
  if (!missing.empty()) {
    throw UnboundPlaceholder("template '" + prompt.name() + "' has unbound placeholders: " +
                             missing);
  }

  std::string out;
  for (const PromptSection& section : prompt.sections()) {
    out += "## ";
    out += ToString(section.name);
    out += '\n';
    std::size_t copied = 0;
    ScanPlaceholders(section.body, [&](std::size_t start, std::size_t end, std::string_view name) {
      out.append(section.body, copied, start - copied);
      out += bindings.find(name)->second;
      copied = end;
    });
    out.append(section.body, copied);
    out += "\n\n";
  }
  return out;
}

InstructionTable DefaultInstructions() {
  return {
      {"literal",
       "Literal inputs: copy values stated in the requirement verbatim. Use "
       "numbers and booleans without quotes."},
      {"table_ref",
       "Table inputs: use the exact system name of a suggested table (for "
       "example incident, not Incident)."},
      {"column_ref",
       "Column inputs: use the exact system name of a column that belongs to "
       "the chosen table."},
      {"data_pill",
       "Data pill inputs: reference an earlier step as "
       "{\"pill\": {\"step\": <step id>, \"path\": <output path>}}. Never "
       "reference the current step or a later one."},
      {"condition",
       "Condition inputs: write {\"condition\": [{\"column\": ..., \"operator\": "
       "..., \"operand\": ...}]}. Add \"join\": \"OR\" to a clause to OR it with "
       "the previous one; clauses are ANDed otherwise. Use suggested column "
       "names and column values."},
  };
}

InstructionTable InstructionsFromJson(const Json& node) {
  InstructionTable table;
  for (auto it = node.begin(); it != node.end(); ++it) {
    table[it.key()] = it->get<std::string>();
  }
  return table;
}

std::string SelectInstructions(const InstructionTable& table,
                               const std::vector<std::string>& types) {
  std::string out;
  std::set<std::string> done;
  for (const std::string& type : types) {
    if (!done.insert(type).second) continue;
    auto it = table.find(type);
    if (it == table.end()) continue;
    if (!out.empty()) out += '\n';
    out += "- " + it->second;
  }
  return out;
}

PromptTemplate DefaultCreateFlowTemplate() {
  return PromptTemplate(
      "createFlow",
      {
          {SectionName::kContext,
           "You build low-code workflows for an enterprise automation platform. "
           "A workflow has one trigger followed by ordered steps. Steps are "
           "actions or flow logic (IF, ELSEIF, ELSE, FOREACH, PARALLEL, "
           "PARALLEL_BRANCH, TRY, CATCH, DOUNTIL) that contain child steps."},
          {SectionName::kTaskDefinition,
           "Write the outline of the workflow that satisfies the requirement: "
           "the trigger, the step names in execution order, and for every step "
           "an annotation copied or paraphrased from the requirement. Do not "
           "fill in step inputs."},
          {SectionName::kInputs,
           "Requirement:\n{{requirement}}\n\nAvailable steps:\n{{suggestions}}"},
          {SectionName::kGuidelines,
           "- Prefer the available steps; their names must be used verbatim.\n"
           "- Use FOREACH to process each record returned by a lookup step.\n"
           "- Keep annotations short and specific; they are used to search for "
           "tables and values later."},
          {SectionName::kConstraints,
           "- ELSE and ELSEIF must directly follow an IF or ELSEIF.\n"
           "- PARALLEL holds two or more PARALLEL_BRANCH children.\n"
           "- TRY is always followed by CATCH.\n"
           "Example: {\"kind\": \"flowlogic\", \"logic\": \"IF\", \"annotation\": "
           "\"if the priority is high\", \"children\": [...]}"},
          {SectionName::kOutputFormat,
           "Return only JSON: {\"trigger\": {\"type\": ..., \"annotation\": ...}, "
           "\"steps\": [{\"id\": ..., \"name\": ..., \"kind\": \"action\" | "
           "\"flowlogic\", \"logic\": ..., \"annotation\": ..., \"children\": "
           "[...]}]}"},
      });
}

PromptTemplate DefaultPopulateInputsTemplate() {
  return PromptTemplate(
      "populateInputs",
      {
          {SectionName::kContext,
           "You fill in the inputs of one step of a low-code workflow. Inputs "
           "refer to database tables, columns, values and outputs of earlier "
           "steps."},
          {SectionName::kTaskDefinition,
           "Generate the inputs of step {{target_step}}, whose annotation is: "
           "{{annotation}}"},
          {SectionName::kInputs,
           "Workflow so far:\n{{partial_flow}}\n\nSuggested tables, columns and "
           "values:\n{{suggestions}}"},
          {SectionName::kGuidelines,
           "{{input_type_instructions}}"},
          {SectionName::kConstraints,
           "- Only use data mentioned in the annotation or the workflow.\n"
           "- Input keys are unique within the step.\n"
           "Example: {\"inputs\": [{\"key\": \"table\", \"kind\": \"table_ref\", "
           "\"value\": \"incident\"}]}"},
          {SectionName::kOutputFormat,
           "Return only JSON: {\"inputs\": [{\"key\": ..., \"kind\": \"literal\" | "
           "\"table_ref\" | \"column_ref\" | \"data_pill\", \"value\": ...}]}"},
      });
}

}  // namespace flowsim
