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

#include "test_util.h"

#include <atomic>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>

#include <unistd.h>

#include "flowsim/eval.h"

namespace flowsim::testing {
namespace {

int Uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <typename T>
const T& Pick(std::mt19937_64& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(Uniform(rng, 0, static_cast<int>(items.size()) - 1))];
}

class WorkflowBuilder {
 public:
  WorkflowBuilder(std::mt19937_64& rng, int max_depth) : rng_(rng), max_depth_(max_depth) {}

  Workflow Build(int max_top_level) {
    Workflow w;
    if (Uniform(rng_, 0, 4) > 0) {
      w.trigger.trigger_type = Pick(rng_, std::vector<std::string>{
                                              "record_create", "record_update", "daily",
                                              "service_catalog"});
      w.trigger.annotation = "when something happens";
      w.trigger.inputs.push_back({"table", Scalar(Pick(rng_, kTables)), ValueKind::kTableRef});
      w.trigger.inputs.push_back(
          {"condition", RandomCondition(/*allow_pills=*/false), ValueKind::kLiteral});
    }
    if (Uniform(rng_, 0, 3) == 0) w.metadata["name"] = "random flow";
    w.steps = Sequence(1, Uniform(rng_, 1, max_top_level));
    return w;
  }

 private:
  inline static const std::vector<std::string> kTables = {"incident", "sys_user", "sc_task",
                                                          "change_request"};
  inline static const std::vector<std::string> kActions = {
      "look_up_records", "record_update", "create_record", "send_email",
      "log",             "add_worknote",  "post_slack_message"};
  inline static const std::vector<std::string> kKeys = {"table", "record", "fields", "to",
                                                        "subject", "message", "conditions"};

  std::string NextId() { return "step_" + std::to_string(++next_id_); }

  PillRef RandomPill() {
    std::vector<std::string> sources = seen_;
    sources.push_back(std::string(kTriggerId));
    return {Pick(rng_, sources), Pick(rng_, std::vector<std::string>{"record", "records",
                                                                       "item", "count"})};
  }

  Scalar RandomScalar() {
    switch (Uniform(rng_, 0, 3)) {
      case 0:
        return Scalar(std::string(Pick(rng_, std::vector<std::string>{"closed", "new", "1", ""})));
      case 1:
        return Scalar(static_cast<std::int64_t>(Uniform(rng_, -5, 100)));
      case 2:
        return Scalar(Uniform(rng_, 0, 1) == 1);
      default:
        return Scalar(0.25 * Uniform(rng_, 1, 40) + 0.125);
    }
  }

  Condition RandomCondition(bool allow_pills = true) {
    Condition c;
    const int n = Uniform(rng_, 1, 3);
    for (int i = 0; i < n; ++i) {
      ConditionClause clause;
      clause.column = Pick(rng_, std::vector<std::string>{"state", "priority", "active"});
      clause.op = Pick(rng_, std::vector<std::string>{"=", "!=", ">"});
      if (allow_pills && Uniform(rng_, 0, 4) == 0) {
        clause.operand = RandomPill();
      } else {
        clause.operand = RandomScalar();
      }
      clause.or_with_previous = i > 0 && Uniform(rng_, 0, 1) == 1;
      c.clauses.push_back(std::move(clause));
    }
    return c;
  }

  std::vector<StepInput> RandomInputs() {
    std::vector<StepInput> inputs;
    std::set<std::string> used;
    const int n = Uniform(rng_, 0, 3);
    for (int i = 0; i < n; ++i) {
      std::string key = Pick(rng_, kKeys);
      if (!used.insert(key).second) continue;
      switch (Uniform(rng_, 0, 4)) {
        case 0:
          inputs.push_back({key, Scalar(Pick(rng_, kTables)), ValueKind::kTableRef});
          break;
        case 1:
          inputs.push_back({key, Scalar(std::string("state")), ValueKind::kColumnRef});
          break;
        case 2:
          inputs.push_back({key, RandomPill(), ValueKind::kDataPill});
          break;
        case 3:
          inputs.push_back({key, RandomCondition(), ValueKind::kLiteral});
          break;
        default:
          inputs.push_back({key, RandomScalar(), ValueKind::kLiteral});
      }
    }
    return inputs;
  }

  Step Action() {
    Step s;
    s.id = NextId();
    s.name = Pick(rng_, kActions);
    s.kind = StepKind::kAction;
    s.annotation = "do " + s.name;
    s.inputs = RandomInputs();
    seen_.push_back(s.id);
    return s;
  }

  Step Logic(LogicKind kind, int depth, std::vector<StepInput> inputs = {}) {
    Step s;
    s.id = NextId();
    s.kind = StepKind::kFlowLogic;
    s.logic_kind = kind;
    s.name = std::string(ToString(kind));
    if (kind != LogicKind::kElse && kind != LogicKind::kParallelBranch) {
      s.annotation = "logic " + s.name;
    }
    s.inputs = std::move(inputs);
    seen_.push_back(s.id);
    if (kind == LogicKind::kParallel) {
      const int branches = Uniform(rng_, 2, 3);
      for (int b = 0; b < branches; ++b) {
        s.children.push_back(Logic(LogicKind::kParallelBranch, depth + 1));
      }
    } else {
      s.children = Sequence(depth + 1, Uniform(rng_, 1, 3));
    }
    return s;
  }

  std::vector<Step> Sequence(int depth, int count) {
    std::vector<Step> out;
    for (int i = 0; i < count; ++i) {
      const int choice = depth >= max_depth_ ? 0 : Uniform(rng_, 0, 9);
      switch (choice) {
        case 6: {
          Condition c = RandomCondition();
          out.push_back(Logic(LogicKind::kIf, depth, {{"condition", c, ValueKind::kLiteral}}));
          while (Uniform(rng_, 0, 2) == 0) {
            out.push_back(Logic(LogicKind::kElseIf, depth,
                                {{"condition", RandomCondition(), ValueKind::kLiteral}}));
          }
          if (Uniform(rng_, 0, 1) == 1) out.push_back(Logic(LogicKind::kElse, depth));
          break;
        }
        case 7:
          out.push_back(Logic(LogicKind::kForEach, depth,
                              {{"items", RandomPill(), ValueKind::kDataPill}}));
          break;
        case 8:
          if (Uniform(rng_, 0, 1) == 0) {
            out.push_back(Logic(LogicKind::kParallel, depth));
          } else {
            out.push_back(Logic(LogicKind::kDoUntil, depth,
                                {{"condition", RandomCondition(), ValueKind::kLiteral}}));
          }
          break;
        case 9:
          out.push_back(Logic(LogicKind::kTry, depth));
          out.push_back(Logic(LogicKind::kCatch, depth));
          break;
        default:
          out.push_back(Action());
      }
    }
    return out;
  }

  std::mt19937_64& rng_;
  int max_depth_;
  int next_id_ = 0;
  std::vector<std::string> seen_;
};

}  // namespace

std::string DataPath(std::string_view name) {
  return std::string(FLOWSIM_TEST_DATA_DIR) + "/" + std::string(name);
}

std::string ReadData(std::string_view name) { return ReadFile(DataPath(name)); }

Workflow LoadWorkflowFixture(std::string_view name) { return ParseWorkflow(ReadData(name)); }

std::vector<StructureFixture> LoadStructureFixtures() {
  std::vector<StructureFixture> out;
  std::istringstream lines(ReadData("structure_fixtures.jsonl"));
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const Json row = Json::parse(line);
    StructureFixture f;
    f.name = row.at("name").get<std::string>();
    f.rule = row.at("rule").get<std::string>();
    f.broken = row.at("broken").get<bool>();
    for (const Json& pair : row.at("expect")) {
      f.expect.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
    }
    f.workflow = ParseWorkflow(row.at("workflow").dump(), ParseOptions{.lenient = true});
    out.push_back(std::move(f));
  }
  return out;
}

std::map<std::string, std::map<std::string, double>> LoadScoreColumns(std::string_view name) {
  std::istringstream lines(ReadData(name));
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream cell_stream(line);
    std::string cell;
    while (std::getline(cell_stream, cell, ',')) cells.push_back(cell);
    return cells;
  };
  std::string line;
  std::getline(lines, line);
  const std::vector<std::string> header = split(line);
  std::map<std::string, std::map<std::string, double>> columns;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    for (std::size_t i = 1; i < header.size(); ++i) {
      columns[header[i]][cells.at(0)] = std::stod(cells.at(i));
    }
  }
  return columns;
}

std::string TempPath(std::string_view stem) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path();
  return (dir / ("flowsim_test_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++) + "_" + std::string(stem)))
      .string();
}

LabeledTree RandomTree(std::mt19937_64& rng, std::size_t nodes, int alphabet) {
  auto label = [&] { return std::string(1, static_cast<char>('a' + Uniform(rng, 0, alphabet - 1))); };
  // Grow by attaching each new node as the last child of a random existing
  // node; parents are tracked as paths of child indices from the root.
  LabeledTree root(label());
  std::vector<std::vector<std::size_t>> paths = {{}};
  for (std::size_t i = 1; i < nodes; ++i) {
    const auto& parent_path = paths[static_cast<std::size_t>(
        Uniform(rng, 0, static_cast<int>(paths.size()) - 1))];
    LabeledTree* parent = &root;
    for (std::size_t step : parent_path) parent = &parent->children[step];
    parent->children.emplace_back(label());
    std::vector<std::size_t> child_path = parent_path;
    child_path.push_back(parent->children.size() - 1);
    paths.push_back(std::move(child_path));
  }
  return root;
}

LabeledTree RandomTreeUpTo(std::mt19937_64& rng, std::size_t max_nodes, int alphabet) {
  return RandomTree(rng, static_cast<std::size_t>(Uniform(rng, 1, static_cast<int>(max_nodes))),
                    alphabet);
}

Workflow RandomWorkflow(std::mt19937_64& rng, int max_top_level_steps, int max_depth) {
  return WorkflowBuilder(rng, max_depth).Build(max_top_level_steps);
}

}  // namespace flowsim::testing
