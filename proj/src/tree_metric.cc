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

#include <algorithm>
#include <string>
#include <unordered_map>
#include <vector>

#include "flowsim/errors.h"

namespace flowsim {
namespace {

std::string RenderScalar(const Scalar& value) {
  struct Visitor {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return Json(d).dump(); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(Visitor{}, value);
}

std::string RenderPill(const PillRef& pill) {
  return "pill:" + pill.source_step_id + "." + pill.output_path;
}

void AppendInputs(const std::vector<StepInput>& inputs, LabeledTree& node) {
  for (const StepInput& input : inputs) {
    node.children.emplace_back(input.key + "=" + RenderInputValue(input.value));
  }
}

LabeledTree StepTree(const Step& step, FlowSimMode mode,
                     const TreeOptions& options) {
  LabeledTree node(step.kind == StepKind::kFlowLogic
                       ? std::string(ToString(*step.logic_kind))
                       : step.name);
  if (options.include_annotations) node.label += "|" + step.annotation;
  for (const Step& child : step.children) {
    node.children.push_back(StepTree(child, mode, options));
  }
  if (mode == FlowSimMode::kOutlineAndInputs) AppendInputs(step.inputs, node);
  return node;
}

// Postorder flattening used by the keyroot algorithm. Indices are 0-based.
struct PostorderTree {
  std::vector<const std::string*> labels;
  std::vector<std::size_t> leftmost;
  std::vector<std::size_t> keyroots;

  explicit PostorderTree(const LabeledTree& root) {
    Visit(root);
    // A node is a keyroot iff no node later in postorder shares its leftmost
    // leaf, i.e. it is the highest node with that leftmost leaf.
    std::vector<bool> seen(labels.size(), false);
    for (std::size_t i = labels.size(); i-- > 0;) {
      if (!seen[leftmost[i]]) {
        seen[leftmost[i]] = true;
        keyroots.push_back(i);
      }
    }
    std::reverse(keyroots.begin(), keyroots.end());
  }

  std::size_t Visit(const LabeledTree& node) {
    std::size_t first_leaf = labels.size();
    bool first = true;
    for (const LabeledTree& child : node.children) {
      std::size_t child_leaf = Visit(child);
      if (first) {
        first_leaf = child_leaf;
        first = false;
      }
    }
    labels.push_back(&node.label);
    leftmost.push_back(first_leaf);
    return first_leaf;
  }
};

// Forest for the reference recursion: an ordered list of subtrees.
using Forest = std::vector<const LabeledTree*>;

void AppendKey(const LabeledTree& tree, std::string& key) {
  key += '(';
  for (char c : tree.label) {
    if (c == '(' || c == ')' || c == '\\' || c == ',') key += '\\';
    key += c;
  }
  for (const LabeledTree& child : tree.children) AppendKey(child, key);
  key += ')';
}

std::string ForestKey(const Forest& forest) {
  std::string key;
  for (const LabeledTree* tree : forest) AppendKey(*tree, key);
  return key;
}

std::int64_t ForestSize(const Forest& forest) {
  std::int64_t n = 0;
  for (const LabeledTree* tree : forest) n += static_cast<std::int64_t>(tree->size());
  return n;
}

class ForestDistance {
 public:
  std::int64_t Distance(const Forest& f, const Forest& g) {
    if (f.empty()) return ForestSize(g);
    if (g.empty()) return ForestSize(f);
    std::string key = ForestKey(f) + "|" + ForestKey(g);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const LabeledTree& v = *f.back();
    const LabeledTree& w = *g.back();

    // Delete v: its children take its place.
    Forest f_minus_v(f.begin(), f.end() - 1);
    for (const LabeledTree& c : v.children) f_minus_v.push_back(&c);
    Forest g_minus_w(g.begin(), g.end() - 1);
    for (const LabeledTree& c : w.children) g_minus_w.push_back(&c);

    std::int64_t best = Distance(f_minus_v, g) + 1;
    best = std::min(best, Distance(f, g_minus_w) + 1);

    Forest f_rest(f.begin(), f.end() - 1);
    Forest g_rest(g.begin(), g.end() - 1);
    Forest v_children;
    for (const LabeledTree& c : v.children) v_children.push_back(&c);
    Forest w_children;
    for (const LabeledTree& c : w.children) w_children.push_back(&c);
    best = std::min(best, Distance(f_rest, g_rest) +
                              Distance(v_children, w_children) +
                              (v.label == w.label ? 0 : 1));
    memo_.emplace(std::move(key), best);
    return best;
  }

 private:
  std::unordered_map<std::string, std::int64_t> memo_;
};

}  // namespace

std::size_t LabeledTree::size() const {
  std::size_t n = 1;
  for (const LabeledTree& child : children) n += child.size();
  return n;
}

std::string ToSExpression(const LabeledTree& tree) {
  std::string out = tree.label;
  if (!tree.children.empty()) {
    out += '(';
    for (std::size_t i = 0; i < tree.children.size(); ++i) {
      if (i > 0) out += ' ';
      out += ToSExpression(tree.children[i]);
    }
    out += ')';
  }
  return out;
}

std::string_view ToString(FlowSimMode mode) {
  return mode == FlowSimMode::kOutline ? "outline" : "full";
}

std::string RenderInputValue(const InputValue& value) {
  if (const auto* pill = std::get_if<PillRef>(&value)) return RenderPill(*pill);
  if (const auto* condition = std::get_if<Condition>(&value)) {
    std::string out;
    for (std::size_t i = 0; i < condition->clauses.size(); ++i) {
      const ConditionClause& clause = condition->clauses[i];
      if (i > 0) out += clause.or_with_previous ? " OR " : " AND ";
      out += clause.column + " " + clause.op + " ";
      if (const auto* pill = std::get_if<PillRef>(&clause.operand)) {
        out += RenderPill(*pill);
      } else {
        out += RenderScalar(std::get<Scalar>(clause.operand));
      }
    }
    return out;
  }
  return RenderScalar(std::get<Scalar>(value));
}

LabeledTree ToTree(const Workflow& workflow, FlowSimMode mode,
                   const TreeOptions& options) {
  LabeledTree root("flow");
  LabeledTree trigger("trigger:" + (workflow.trigger.is_null()
                                        ? std::string("null")
                                        : workflow.trigger.trigger_type));
  if (options.include_annotations) trigger.label += "|" + workflow.trigger.annotation;
  if (mode == FlowSimMode::kOutlineAndInputs) {
    AppendInputs(workflow.trigger.inputs, trigger);
  }
  root.children.push_back(std::move(trigger));
  for (const Step& step : workflow.steps) {
    root.children.push_back(StepTree(step, mode, options));
  }
  return root;
}

std::int64_t TreeEditDistance(const LabeledTree& a, const LabeledTree& b,
                              std::uint64_t cell_cap) {
  const std::uint64_t na = a.size();
  const std::uint64_t nb = b.size();
  if (na * nb > cell_cap) {
    throw ResourceError("tree edit distance over " + std::to_string(na) + "x" +
                        std::to_string(nb) + " nodes exceeds the cell cap of " +
                        std::to_string(cell_cap));
  }
  const PostorderTree ta(a);
  const PostorderTree tb(b);

  std::vector<std::int64_t> tree_dist(na * nb, 0);
  auto td = [&](std::size_t i, std::size_t j) -> std::int64_t& {
    return tree_dist[i * nb + j];
  };
  std::vector<std::int64_t> forest;

  for (std::size_t i : ta.keyroots) {
    for (std::size_t j : tb.keyroots) {
      const std::size_t li = ta.leftmost[i];
      const std::size_t lj = tb.leftmost[j];
      const std::size_t rows = i - li + 2;
      const std::size_t cols = j - lj + 2;
      forest.assign(rows * cols, 0);
      auto fd = [&](std::size_t x, std::size_t y) -> std::int64_t& {
        return forest[x * cols + y];
      };
      for (std::size_t x = 1; x < rows; ++x) fd(x, 0) = fd(x - 1, 0) + 1;
      for (std::size_t y = 1; y < cols; ++y) fd(0, y) = fd(0, y - 1) + 1;

      for (std::size_t x = 1; x < rows; ++x) {
        const std::size_t node_a = li + x - 1;
        for (std::size_t y = 1; y < cols; ++y) {
          const std::size_t node_b = lj + y - 1;
          const std::int64_t del = fd(x - 1, y) + 1;
          const std::int64_t ins = fd(x, y - 1) + 1;
          if (ta.leftmost[node_a] == li && tb.leftmost[node_b] == lj) {
            const std::int64_t relabel =
                fd(x - 1, y - 1) + (*ta.labels[node_a] == *tb.labels[node_b] ? 0 : 1);
            fd(x, y) = std::min({del, ins, relabel});
            td(node_a, node_b) = fd(x, y);
          } else {
            const std::size_t px = ta.leftmost[node_a] - li;
            const std::size_t py = tb.leftmost[node_b] - lj;
            fd(x, y) = std::min({del, ins, fd(px, py) + td(node_a, node_b)});
          }
        }
      }
    }
  }
  return td(na - 1, nb - 1);
}

std::int64_t BruteForceTed(const LabeledTree& a, const LabeledTree& b) {
  if (a.size() > kBruteForceMaxNodes || b.size() > kBruteForceMaxNodes) {
    throw ResourceError("brute-force tree edit distance is limited to " +
                        std::to_string(kBruteForceMaxNodes) + " nodes per tree");
  }
  ForestDistance solver;
  return solver.Distance(Forest{&a}, Forest{&b});
}

double ScoreFromDistance(std::int64_t distance, std::int64_t normalizer) {
  // One rounding step: integral scores such as 75 come out exact.
  const double raw = 100.0 * static_cast<double>(normalizer - distance) /
                     static_cast<double>(normalizer);
  return std::clamp(raw, 0.0, 100.0);
}

FlowSimScore FlowSim(const Workflow& expected, const Workflow& generated,
                     FlowSimMode mode, const FlowSimOptions& options) {
  const LabeledTree expected_tree = ToTree(expected, mode, options.tree);
  const LabeledTree generated_tree = ToTree(generated, mode, options.tree);
  const auto ne = static_cast<std::int64_t>(expected_tree.size());
  const auto ng = static_cast<std::int64_t>(generated_tree.size());

  FlowSimScore score;
  score.mode = mode;
  score.distance = TreeEditDistance(expected_tree, generated_tree, options.cell_cap);
  score.normalizer =
      options.normalizer == Normalizer::kMaxSize ? std::max(ne, ng) : ne + ng;
  score.value = ScoreFromDistance(score.distance, score.normalizer);
  return score;
}

}  // namespace flowsim
