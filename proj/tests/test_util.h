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

// Fixture paths and seeded random generators shared by the tests.

#ifndef FLOWSIM_TESTS_TEST_UTIL_H_
#define FLOWSIM_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flowsim/tree_metric.h"
#include "flowsim/workflow.h"

namespace flowsim::testing {

std::string DataPath(std::string_view name);
std::string ReadData(std::string_view name);
Workflow LoadWorkflowFixture(std::string_view name);

// One line of structure_fixtures.jsonl, parsed leniently.
struct StructureFixture {
  std::string name;
  std::string rule;
  bool broken = false;
  std::vector<std::pair<std::string, std::string>> expect;  // (rule, step id)
  Workflow workflow;
};

std::vector<StructureFixture> LoadStructureFixtures();

// Numeric CSV with a `sample_id` column: column name -> sample id -> value.
std::map<std::string, std::map<std::string, double>> LoadScoreColumns(std::string_view name);

// A fresh path under the system temp directory; the file is not created.
std::string TempPath(std::string_view stem);

// Random ordered tree with exactly `nodes` nodes, labels drawn from
// the first `alphabet` lowercase letters.
LabeledTree RandomTree(std::mt19937_64& rng, std::size_t nodes, int alphabet);

// Size drawn uniformly from [1, max_nodes].
LabeledTree RandomTreeUpTo(std::mt19937_64& rng, std::size_t max_nodes, int alphabet);

// A workflow that passes DefaultRuleSet(): matched IF/ELSEIF/ELSE chains,
// PARALLEL with at least two branches, TRY followed by CATCH, non-empty
// bodies, pills that only reference earlier steps.
Workflow RandomWorkflow(std::mt19937_64& rng, int max_top_level_steps = 6, int max_depth = 3);

}  // namespace flowsim::testing

#endif  // FLOWSIM_TESTS_TEST_UTIL_H_
