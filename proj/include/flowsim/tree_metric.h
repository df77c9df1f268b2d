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

// Workflow similarity through ordered tree edit distance.
//
// A workflow becomes a labeled ordered tree rooted at "flow". The trigger is
// the first child ("trigger:<type>", or "trigger:null"), followed by the
// top-level steps in execution order. Action steps are labeled by step name,
// flow-logic steps by their logic kind, and flow-logic bodies hang below their
// owner. In outline-and-inputs mode every step (and the trigger) also gets one
// leaf per input, appended after its body, labeled "key=value" with:
//
//   strings          verbatim
//   integers/doubles JSON number text
//   booleans         true / false
//   pills            pill:<source_step>.<path>
//   conditions       clauses in stored order, "column op operand", joined by
//                    " AND " / " OR "
//
// Input values are compared by exact label equality.

#ifndef FLOWSIM_TREE_METRIC_H_
#define FLOWSIM_TREE_METRIC_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "flowsim/workflow.h"

namespace flowsim {

struct LabeledTree {
  std::string label;
  std::vector<LabeledTree> children;

  LabeledTree() = default;
  explicit LabeledTree(std::string l, std::vector<LabeledTree> c = {})
      : label(std::move(l)), children(std::move(c)) {}

  std::size_t size() const;
  bool operator==(const LabeledTree&) const = default;
};

// Compact s-expression, e.g. "flow(trigger:record_update look_up_records)".
// Used for diagnostics and tests.
std::string ToSExpression(const LabeledTree& tree);

enum class FlowSimMode { kOutline, kOutlineAndInputs };

std::string_view ToString(FlowSimMode mode);

enum class Normalizer {
  // 1 - d / max(|A|, |B|)
  kMaxSize,
  // 1 - d / (|A| + |B|), for sensitivity studies.
  kSumSize,
};

struct TreeOptions {
  // Appends "|<annotation>" to step and trigger labels.
  bool include_annotations = false;
};

LabeledTree ToTree(const Workflow& workflow, FlowSimMode mode,
                   const TreeOptions& options = {});

std::string RenderInputValue(const InputValue& value);

inline constexpr std::uint64_t kDefaultTedCellCap = 100'000'000;

// Zhang-Shasha ordered tree edit distance with unit costs. Throws
// ResourceError when |a| * |b| exceeds `cell_cap`.
std::int64_t TreeEditDistance(const LabeledTree& a, const LabeledTree& b,
                              std::uint64_t cell_cap = kDefaultTedCellCap);

inline constexpr std::size_t kBruteForceMaxNodes = 8;

// Reference implementation: memoized recursion over forests, removing the
// rightmost root at each step. Independent of the keyroot algorithm and only
// meant as a test oracle; throws ResourceError above kBruteForceMaxNodes.
std::int64_t BruteForceTed(const LabeledTree& a, const LabeledTree& b);

struct FlowSimOptions {
  Normalizer normalizer = Normalizer::kMaxSize;
  TreeOptions tree;
  std::uint64_t cell_cap = kDefaultTedCellCap;
};

struct FlowSimScore {
  // 100 * (1 - distance / normalizer), clamped to [0, 100]; forced to 0 when
  // a structure gate fired.
  double value = 0.0;
  FlowSimMode mode = FlowSimMode::kOutline;
  std::int64_t distance = 0;
  std::int64_t normalizer = 1;
  bool gated = false;

  bool operator==(const FlowSimScore&) const = default;
};

FlowSimScore FlowSim(const Workflow& expected, const Workflow& generated,
                     FlowSimMode mode, const FlowSimOptions& options = {});

double ScoreFromDistance(std::int64_t distance, std::int64_t normalizer);

}  // namespace flowsim

#endif  // FLOWSIM_TREE_METRIC_H_
