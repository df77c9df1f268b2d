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

#include "flowsim/tree_metric.h"

#include <random>

#include "doctest.h"
#include "flowsim/errors.h"
#include "test_util.h"

namespace flowsim {
namespace {

using T = LabeledTree;

TEST_CASE("distance on small hand-built trees") {
  const T a("a");
  CHECK(TreeEditDistance(a, a) == 0);
  CHECK(TreeEditDistance(a, T("b")) == 1);
  CHECK(TreeEditDistance(a, T("a", {T("b")})) == 1);
  CHECK(TreeEditDistance(T("a", {T("b"), T("c")}), T("a", {T("c"), T("b")})) == 2);
  // Deleting the inner node lifts its children.
  CHECK(TreeEditDistance(T("r", {T("x", {T("a"), T("b")})}), T("r", {T("a"), T("b")})) == 1);
}

TEST_CASE("textbook pair from the keyroot literature has distance 2") {
  // f(d(a c(b)) e) versus f(c(d(a b)) e)
  const T left("f", {T("d", {T("a"), T("c", {T("b")})}), T("e")});
  const T right("f", {T("c", {T("d", {T("a"), T("b")})}), T("e")});
  CHECK(TreeEditDistance(left, right) == 2);
  CHECK(BruteForceTed(left, right) == 2);
}

TEST_CASE("keyroot algorithm agrees with the forest recursion") {
  std::mt19937_64 rng(2026);
  for (int i = 0; i < 1500; ++i) {
    const T a = testing::RandomTreeUpTo(rng, 7, 3);
    const T b = testing::RandomTreeUpTo(rng, 7, 3);
    const auto fast = TreeEditDistance(a, b);
    const auto slow = BruteForceTed(a, b);
    if (fast != slow) {
      FAIL_CHECK(ToSExpression(a) << " vs " << ToSExpression(b) << ": " << fast << " != "
                                  << slow);
    }
  }
}

TEST_CASE("metric axioms hold on random triples") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 600; ++i) {
    const T a = testing::RandomTreeUpTo(rng, 10, 3);
    const T b = testing::RandomTreeUpTo(rng, 10, 3);
    const T c = testing::RandomTreeUpTo(rng, 10, 3);
    const auto ab = TreeEditDistance(a, b);
    CHECK(TreeEditDistance(a, a) == 0);
    CHECK(ab == TreeEditDistance(b, a));
    CHECK(ab <= TreeEditDistance(a, c) + TreeEditDistance(c, b));
    CHECK((ab == 0) == (a == b));
    CHECK(ab <= static_cast<std::int64_t>(a.size() + b.size()));
  }
}

TEST_CASE("cell cap raises ResourceError") {
  const T a("a", {T("b"), T("c")});
  CHECK_THROWS_AS(TreeEditDistance(a, a, 8), ResourceError);
  CHECK(TreeEditDistance(a, a, 9) == 0);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(BruteForceTed(testing::RandomTree(rng, kBruteForceMaxNodes + 1, 2), a),
                  ResourceError);
}

TEST_CASE("workflow trees use logic kinds, trigger types and rendered inputs") {
  const Workflow w = testing::LoadWorkflowFixture("sample_flow.json");
  const T outline = ToTree(w, FlowSimMode::kOutline);
  CHECK(ToSExpression(outline) ==
        "flow(trigger:record_update look_up_records FOREACH(record_update))");
  CHECK(outline.size() == 5);
  const T full = ToTree(w, FlowSimMode::kOutlineAndInputs);
  CHECK(full.size() == 13);
  CHECK(full.children[0].children[0].label == "table=sys_user");
  CHECK(full.children[2].children.back().label == "items=pill:step_1.records");

  const T annotated = ToTree(w, FlowSimMode::kOutline, {.include_annotations = true});
  CHECK(annotated.children[0].label == "trigger:record_update|every time a user becomes inactive");
}

TEST_CASE("a null trigger gets its own label") {
  Workflow w;
  CHECK(ToSExpression(ToTree(w, FlowSimMode::kOutline)) == "flow(trigger:null)");
}

TEST_CASE("scalar rendering") {
  CHECK(RenderInputValue(Scalar(std::string("x"))) == "x");
  CHECK(RenderInputValue(Scalar(std::int64_t{-3})) == "-3");
  CHECK(RenderInputValue(Scalar(true)) == "true");
  CHECK(RenderInputValue(Scalar(0.375)) == "0.375");
  Condition c;
  c.clauses.push_back({"state", "=", Scalar(std::string("closed")), false});
  c.clauses.push_back({"owner", "!=", PillRef{"trigger", "user"}, true});
  CHECK(RenderInputValue(c) == "state = closed OR owner != pill:trigger.user");
}

TEST_CASE("score formula and normalizers") {
  CHECK(ScoreFromDistance(0, 4) == 100.0);
  CHECK(ScoreFromDistance(1, 4) == 75.0);
  CHECK(ScoreFromDistance(1, 10) == 90.0);
  CHECK(ScoreFromDistance(9, 4) == 0.0);

  const Workflow w = testing::LoadWorkflowFixture("sample_flow.json");
  Workflow changed = w;
  changed.steps[0].name = "look_up_record";
  const FlowSimScore outline = FlowSim(w, changed, FlowSimMode::kOutline);
  CHECK(outline.distance == 1);
  CHECK(outline.normalizer == 5);
  CHECK(outline.value == 80.0);

  FlowSimOptions sum_options;
  sum_options.normalizer = Normalizer::kSumSize;
  const FlowSimScore sum = FlowSim(w, changed, FlowSimMode::kOutline, sum_options);
  CHECK(sum.normalizer == 10);
  CHECK(sum.value == 90.0);
}

TEST_CASE("one relabel on a four node outline scores exactly 75") {
  Workflow expected;
  expected.trigger.trigger_type = "record_create";
  for (const char* name : {"log", "send_email"}) {
    Step s;
    s.id = std::string("id_") + name;
    s.name = name;
    s.annotation = name;
    expected.steps.push_back(s);
  }
  Workflow generated = expected;
  generated.steps[1].name = "post_slack_message";
  const FlowSimScore score = FlowSim(expected, generated, FlowSimMode::kOutline);
  CHECK(score.distance == 1);
  CHECK(score.normalizer == 4);
  CHECK(score.value == 75.0);
}

TEST_CASE("self score is 100 and scores stay in range") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 150; ++i) {
    const Workflow a = testing::RandomWorkflow(rng);
    const Workflow b = testing::RandomWorkflow(rng);
    for (FlowSimMode mode : {FlowSimMode::kOutline, FlowSimMode::kOutlineAndInputs}) {
      CHECK(FlowSim(a, a, mode).value == 100.0);
      const double v = FlowSim(a, b, mode).value;
      CHECK(v >= 0.0);
      CHECK(v <= 100.0);
      CHECK(v == FlowSim(b, a, mode).value);
    }
  }
}

TEST_CASE("step ids do not affect the score") {
  const Workflow w = testing::LoadWorkflowFixture("sample_flow.json");
  Workflow renamed = w;
  renamed.steps[0].id = "lookup";
  renamed.steps[1].id = "loop";
  CHECK(FlowSim(w, renamed, FlowSimMode::kOutline).value == 100.0);
}

}  // namespace
}  // namespace flowsim
