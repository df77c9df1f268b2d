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

#include "flowsim/structure.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "flowsim/errors.h"

namespace flowsim {
namespace {

using Sink = std::vector<Violation>;

// Calls fn(siblings, parent) for the top-level list and every body; parent
// is null at the top level.
template <typename Fn>
void ForEachSiblingList(const std::vector<Step>& steps, const Step* parent,
                        Fn&& fn) {
  fn(steps, parent);
  for (const Step& step : steps) ForEachSiblingList(step.children, &step, fn);
}

template <typename Fn>
void ForEachStep(const std::vector<Step>& steps, Fn&& fn) {
  for (const Step& step : steps) {
    fn(step);
    ForEachStep(step.children, fn);
  }
}

std::string Describe(const Step& step) {
  return std::string(step.kind == StepKind::kFlowLogic
                         ? ToString(*step.logic_kind)
                         : std::string_view(step.name)) +
         " '" + step.id + "'";
}

void CheckElseFollowsIf(const Workflow& w, const RuleContext&, Sink& out) {
  ForEachSiblingList(w.steps, nullptr, [&](const std::vector<Step>& list, const Step*) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Step& step = list[i];
      if (!step.is_logic(LogicKind::kElse) && !step.is_logic(LogicKind::kElseIf)) {
        continue;
      }
      const bool ok = i > 0 && (list[i - 1].is_logic(LogicKind::kIf) ||
                                list[i - 1].is_logic(LogicKind::kElseIf));
      if (!ok) {
        out.push_back({"R1", step.id,
                       Describe(step) + " is not preceded by an IF or ELSEIF"});
      }
    }
  });
}

void CheckParallelBranches(const Workflow& w, const RuleContext&, Sink& out) {
  ForEachStep(w.steps, [&](const Step& step) {
    if (!step.is_logic(LogicKind::kParallel)) return;
    const auto branches = std::count_if(
        step.children.begin(), step.children.end(),
        [](const Step& c) { return c.is_logic(LogicKind::kParallelBranch); });
    if (branches < 2) {
      out.push_back({"R2", step.id,
                     Describe(step) + " has " + std::to_string(branches) +
                         " branch(es); at least 2 are required"});
    }
  });
}

void CheckTryCatch(const Workflow& w, const RuleContext&, Sink& out) {
  ForEachSiblingList(w.steps, nullptr, [&](const std::vector<Step>& list, const Step*) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Step& step = list[i];
      if (step.is_logic(LogicKind::kCatch) &&
          (i == 0 || !list[i - 1].is_logic(LogicKind::kTry))) {
        out.push_back({"R3", step.id, Describe(step) + " is not preceded by a TRY"});
      }
      if (step.is_logic(LogicKind::kTry) &&
          (i + 1 == list.size() || !list[i + 1].is_logic(LogicKind::kCatch))) {
        out.push_back({"R3", step.id, Describe(step) + " is not followed by a CATCH"});
      }
    }
  });
}

void CheckForEachBody(const Workflow& w, const RuleContext&, Sink& out) {
  ForEachStep(w.steps, [&](const Step& step) {
    if (step.is_logic(LogicKind::kForEach) && step.children.empty()) {
      out.push_back({"R4", step.id, Describe(step) + " has an empty body"});
    }
  });
}

bool ProducesRecords(const Step& step, const RuleContext& context) {
  if (step.kind != StepKind::kAction) return false;
  if (context.records_steps.count(step.name) != 0) return true;
  return std::any_of(context.records_prefixes.begin(), context.records_prefixes.end(),
                     [&](const std::string& p) { return step.name.rfind(p, 0) == 0; });
}

void CheckForEachSource(const Workflow& w, const RuleContext& context, Sink& out) {
  bool records_seen = false;
  for (const WalkEntry& entry : Walk(w)) {
    if (entry.is_trigger()) continue;
    const Step& step = *entry.step;
    if (step.is_logic(LogicKind::kForEach)) {
      const auto pills = CollectPills(step.inputs);
      if (!pills.empty()) {
        const Step* source = FindStep(w, pills.front().source_step_id);
        if (source == nullptr || !ProducesRecords(*source, context)) {
          out.push_back({"R5", step.id,
                         Describe(step) + " iterates over '" +
                             pills.front().source_step_id +
                             "', which does not produce records"});
        }
      } else if (!records_seen) {
        out.push_back({"R5", step.id,
                       Describe(step) + " has no preceding records lookup"});
      }
    }
    if (ProducesRecords(step, context)) records_seen = true;
  }
}

void CheckPills(const Workflow& w, const RuleContext&, Sink& out) {
  std::unordered_set<std::string_view> seen;
  for (const WalkEntry& entry : Walk(w)) {
    const auto& inputs = entry.is_trigger() ? w.trigger.inputs : entry.step->inputs;
    for (const PillRef& pill : CollectPills(inputs)) {
      if (seen.count(pill.source_step_id) == 0) {
        out.push_back({"R6", std::string(entry.id),
                       "pill references '" + pill.source_step_id +
                           "', which does not precede step '" +
                           std::string(entry.id) + "'"});
      }
    }
    seen.insert(entry.id);
  }
}

bool NeedsBody(const Step& step) {
  if (step.kind != StepKind::kFlowLogic) return false;
  switch (*step.logic_kind) {
    case LogicKind::kIf:
    case LogicKind::kElseIf:
    case LogicKind::kElse:
    case LogicKind::kTry:
    case LogicKind::kCatch:
    case LogicKind::kDoUntil:
    case LogicKind::kParallelBranch:
      return true;
    case LogicKind::kForEach:   // R4
    case LogicKind::kParallel:  // R2
      return false;
  }
  return false;
}

void CheckArity(const Workflow& w, const RuleContext&, Sink& out) {
  ForEachSiblingList(w.steps, nullptr, [&](const std::vector<Step>& list, const Step* parent) {
    for (const Step& step : list) {
      if (step.kind == StepKind::kAction && !step.children.empty()) {
        out.push_back({"R7", step.id, Describe(step) + " is an action with children"});
      }
      if (NeedsBody(step) && step.children.empty()) {
        out.push_back({"R7", step.id, Describe(step) + " has an empty body"});
      }
      if (step.is_logic(LogicKind::kParallelBranch) &&
          (parent == nullptr || !parent->is_logic(LogicKind::kParallel))) {
        out.push_back({"R7", step.id, Describe(step) + " is not directly inside a PARALLEL"});
      }
      if (step.is_logic(LogicKind::kParallel)) {
        for (const Step& child : step.children) {
          if (!child.is_logic(LogicKind::kParallelBranch)) {
            out.push_back({"R7", step.id,
                           Describe(step) + " contains " + Describe(child) +
                               " outside a PARALLEL_BRANCH"});
          }
        }
      }
    }
  });
}

Severity ParseSeverity(const std::string& text) {
  if (text == "error") return Severity::kError;
  if (text == "warning" || text == "warn") return Severity::kWarning;
  throw SchemaError("severity", "unknown severity '" + text + "'");
}

Json ViolationsToJson(const std::vector<Violation>& list) {
  Json out = Json::array();
  for (const Violation& v : list) {
    out.push_back({{"rule_id", v.rule_id}, {"step_id", v.step_id}, {"message", v.message}});
  }
  return out;
}

std::vector<Violation> ViolationsFromJson(const Json& list) {
  std::vector<Violation> out;
  for (const Json& v : list) {
    out.push_back({v.at("rule_id").get<std::string>(), v.at("step_id").get<std::string>(),
                   v.at("message").get<std::string>()});
  }
  return out;
}

}  // namespace

std::string_view ToString(Severity severity) {
  return severity == Severity::kError ? "error" : "warning";
}

const std::vector<StructureRule>& BuiltinRules() {
  static const std::vector<StructureRule> rules = {
      {"R1", "ELSE/ELSEIF must immediately follow an IF/ELSEIF sibling",
       Severity::kError, CheckElseFollowsIf},
      {"R2", "PARALLEL must have at least two branches", Severity::kError,
       CheckParallelBranches},
      {"R3", "CATCH must follow TRY and TRY must have a CATCH", Severity::kError,
       CheckTryCatch},
      {"R4", "FOREACH must have a non-empty body", Severity::kError, CheckForEachBody},
      {"R5", "FOREACH should iterate over a preceding records lookup",
       Severity::kWarning, CheckForEachSource},
      {"R6", "data pills must reference a preceding step", Severity::kError,
       CheckPills},
      {"R7", "flow logic must have the child arity its kind requires",
       Severity::kError, CheckArity},
  };
  return rules;
}

RuleSet DefaultRuleSet() {
  RuleSet set;
  for (const StructureRule& rule : BuiltinRules()) {
    if (rule.id != "R5") set.rules.push_back(rule);
  }
  return set;
}

RuleSet MinimalRuleSet() {
  RuleSet set;
  set.rules.push_back(BuiltinRules().front());
  return set;
}

RuleSet RuleSetFromJson(const Json& config) {
  if (!config.is_object()) throw SchemaError("", "rule config must be an object");
  RuleSet set = DefaultRuleSet();
  if (auto ids = config.find("rules"); ids != config.end()) {
    if (!ids->is_array()) throw SchemaError("rules", "expected an array of rule ids");
    set.rules.clear();
    for (const Json& id : *ids) {
      const auto& builtin = BuiltinRules();
      auto it = std::find_if(builtin.begin(), builtin.end(), [&](const StructureRule& r) {
        return id.is_string() && r.id == id.get<std::string>();
      });
      if (it == builtin.end()) throw SchemaError("rules", "unknown rule " + id.dump());
      set.rules.push_back(*it);
    }
    std::sort(set.rules.begin(), set.rules.end(),
              [](const StructureRule& a, const StructureRule& b) { return a.id < b.id; });
    set.rules.erase(std::unique(set.rules.begin(), set.rules.end(),
                                [](const StructureRule& a, const StructureRule& b) {
                                  return a.id == b.id;
                                }),
                    set.rules.end());
  }
  if (auto severities = config.find("severity"); severities != config.end()) {
    for (auto it = severities->begin(); it != severities->end(); ++it) {
      auto rule = std::find_if(set.rules.begin(), set.rules.end(),
                               [&](const StructureRule& r) { return r.id == it.key(); });
      if (rule == set.rules.end()) {
        throw SchemaError("severity." + it.key(), "rule is not enabled");
      }
      rule->severity = ParseSeverity(it->get<std::string>());
    }
  }
  if (auto names = config.find("records_steps"); names != config.end()) {
    set.context.records_steps.clear();
    for (const Json& name : *names) set.context.records_steps.insert(name.get<std::string>());
  }
  return set;
}

RuleSet LoadRuleSet(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open rule config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return RuleSetFromJson(Json::parse(buffer.str()));
  } catch (const Json::exception& e) {
    throw SyntaxError(path + ": " + e.what());
  }
}

StructureReport ValidateStructure(const Workflow& workflow, const RuleSet& rules,
                                  std::string workflow_id) {
  std::unordered_map<std::string_view, std::size_t> order;
  const auto walk = Walk(workflow);
  for (std::size_t i = 0; i < walk.size(); ++i) order.emplace(walk[i].id, i);
  auto position = [&](const Violation& v) {
    auto it = order.find(v.step_id);
    return it == order.end() ? walk.size() : it->second;
  };
  auto by_position = [&](const Violation& a, const Violation& b) {
    const auto pa = position(a);
    const auto pb = position(b);
    return pa != pb ? pa < pb : a.rule_id < b.rule_id;
  };

  StructureReport report;
  report.workflow_id = std::move(workflow_id);
  for (const StructureRule& rule : rules.rules) {
    auto& sink = rule.severity == Severity::kError ? report.violations : report.warnings;
    rule.check(workflow, rules.context, sink);
  }
  std::stable_sort(report.violations.begin(), report.violations.end(), by_position);
  std::stable_sort(report.warnings.begin(), report.warnings.end(), by_position);
  return report;
}

double StructureErrorRate(std::span<const StructureReport> reports) {
  if (reports.empty()) throw EmptyInput("structure error rate of an empty batch");
  const auto broken = std::count_if(reports.begin(), reports.end(),
                                    [](const StructureReport& r) { return r.has_errors(); });
  return static_cast<double>(broken) / static_cast<double>(reports.size());
}

std::vector<ScoredSample> ApplyStructureGate(std::span<const ScoredSample> samples,
                                             std::span<const StructureReport> reports) {
  if (samples.size() != reports.size()) {
    throw IdMismatch("gate got " + std::to_string(samples.size()) + " scores and " +
                     std::to_string(reports.size()) + " reports");
  }
  std::vector<ScoredSample> gated(samples.begin(), samples.end());
  for (std::size_t i = 0; i < gated.size(); ++i) {
    if (gated[i].id != reports[i].workflow_id) {
      throw IdMismatch("score '" + gated[i].id + "' is aligned with report '" +
                       reports[i].workflow_id + "'");
    }
    if (!reports[i].has_errors()) continue;
    for (FlowSimScore* score : {&gated[i].outline, &gated[i].full}) {
      score->value = 0.0;
      score->gated = true;
    }
  }
  return gated;
}

Json ToJson(const StructureReport& report) {
  return {{"workflow_id", report.workflow_id},
          {"has_errors", report.has_errors()},
          {"violations", ViolationsToJson(report.violations)},
          {"warnings", ViolationsToJson(report.warnings)}};
}

StructureReport StructureReportFromJson(const Json& node) {
  StructureReport report;
  report.workflow_id = node.at("workflow_id").get<std::string>();
  report.violations = ViolationsFromJson(node.at("violations"));
  report.warnings = ViolationsFromJson(node.value("warnings", Json::array()));
  return report;
}

}  // namespace flowsim
