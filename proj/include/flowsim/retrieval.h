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

// Deterministic lexical retriever over an installation's step catalog and
// data artifacts (tables, columns, column values).
//
// Tokenization: lowercase, split on anything that is not a letter or digit
// (which also splits snake_case) and on lower-to-upper camelCase boundaries,
// drop a short stopword list, then strip plurals ("ies" -> "y", trailing "s"
// except "ss" on tokens longer than three characters).
//
// Scoring, per document family (steps, tables, columns, values):
//
//   score(doc) = sum_q w(q) * m(q, doc) / sum_q w(q)
//
// over distinct query tokens q. m is the best match between q and a document
// token t, times the token's field weight: 1 for t == q, 0.5 when the shorter
// of the two has at least four characters and is a substring of the other.
// w(q) = 1 / (1 + ln df(q)) where df(q) counts documents of the family that
// match q at all (w = 1 when df = 0). The weight depends only on df, so
// adding an entry that matches no query token leaves every existing score,
// and therefore the ranking, unchanged.
//
// Field weights: names weigh 1 and descriptions 0.5. A column also carries
// its table's tokens at 0.5; a value carries its column's at 0.5 and its
// table's at 0.25. In addition, a negated mention of a
// column ("inactive", "unassigned", "not active") counts as a full match for
// that column's false-like values (false, 0, no, n); a plain mention counts
// as a full match for its true-like values (true, 1, yes, y).
//
// Ranked lists drop zero scores, sort by score descending, break ties by
// fewer distinct document tokens, then name, then parent, and truncate to k.

#ifndef FLOWSIM_RETRIEVAL_H_
#define FLOWSIM_RETRIEVAL_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flowsim/workflow.h"

namespace flowsim {

std::vector<std::string> Tokenize(std::string_view text);

struct InputSpec {
  std::string key;
  // Instruction family: literal, table_ref, column_ref, data_pill, condition.
  std::string type;

  bool operator==(const InputSpec&) const = default;
};

struct StepEntry {
  std::string step_name;
  std::string description;
  StepKind kind = StepKind::kAction;
  std::string installation_tag;
  // nullopt: unknown, the step is assumed to accept inputs.
  std::optional<std::vector<InputSpec>> inputs;
};

struct ColumnEntry {
  std::string name;
  std::string description;
  std::vector<std::string> sample_values;
};

struct ArtifactEntry {
  std::string table;
  std::string description;
  std::vector<ColumnEntry> columns;
};

struct Suggestion {
  std::string name;
  // Empty for steps and tables, the table for columns, "table.column" for
  // values.
  std::string parent;
  double score = 0.0;

  bool operator==(const Suggestion&) const = default;
};

inline constexpr std::size_t kDefaultStepK = 20;
inline constexpr std::size_t kDefaultArtifactK = 10;

struct SuggestionSet {
  std::string query;
  std::size_t k = kDefaultStepK;
  std::vector<Suggestion> steps;
  std::vector<Suggestion> tables;
  std::vector<Suggestion> columns;
  std::vector<Suggestion> values;

  bool operator==(const SuggestionSet&) const = default;
};

class StepCatalog {
 public:
  StepCatalog() = default;

  // Throws DuplicateName when a step name repeats within an installation tag
  // or a table name repeats.
  static StepCatalog Index(std::vector<StepEntry> steps,
                           std::vector<ArtifactEntry> artifacts = {});

  // Catalog JSONL: one object per line, {"type": "step", ...} or
  // {"type": "table", ...}; see docs/catalog.md.
  static StepCatalog Load(const std::string& path);
  static StepCatalog FromJsonLines(std::string_view text);

  // Entries tagged `tag` plus untagged (global) entries.
  StepCatalog ForInstallation(std::string_view tag) const;

  const std::vector<StepEntry>& steps() const { return steps_; }
  const std::vector<ArtifactEntry>& artifacts() const { return artifacts_; }
  std::size_t size() const { return steps_.size(); }

  const StepEntry* FindStep(std::string_view step_name) const;

  struct Posting {
    std::size_t doc;
    double weight;
  };
  struct Family {
    std::vector<Suggestion> docs;
    // Distinct tokens per doc; fewer wins among equal scores.
    std::vector<std::size_t> token_counts;
    // token -> postings, one per (doc, best field weight).
    std::map<std::string, std::vector<Posting>, std::less<>> postings;
    // Polarity evidence: column doc id for each value doc, and whether the
    // value is false-like (-1), true-like (+1) or neither (0).
    std::vector<std::string> polarity_column;
    std::vector<int> polarity;
  };

  const Family& step_family() const { return step_family_; }
  const Family& table_family() const { return table_family_; }
  const Family& column_family() const { return column_family_; }
  const Family& value_family() const { return value_family_; }

 private:
  std::vector<StepEntry> steps_;
  std::vector<ArtifactEntry> artifacts_;
  Family step_family_;
  Family table_family_;
  Family column_family_;
  Family value_family_;
};

// Throws EmptyCatalog when the catalog has no steps.
SuggestionSet SuggestSteps(std::string_view requirement, const StepCatalog& catalog,
                           std::size_t k = kDefaultStepK);

// k applies to each of the table, column and value lists. Throws
// EmptyCatalog when the catalog has no artifacts.
SuggestionSet SuggestArtifacts(std::string_view annotation, const StepCatalog& catalog,
                               std::size_t k = kDefaultArtifactK);

// Distinct action step names in walk order. Flow-logic elements are not
// retrieved and are excluded.
std::vector<std::string> ExpectedStepNames(const Workflow& expected);

// Every expected action step plus the best lexical fillers for `query` up to
// k entries (k grows to the number of expected steps if needed). Throws
// MissingStep when an expected step is not in the catalog.
SuggestionSet PerfectRag(const Workflow& expected, const StepCatalog& catalog,
                         std::size_t k = kDefaultStepK, std::string_view query = {});

// Fraction of expected action step names present in suggestions.steps; 1.0
// when the workflow has no action steps.
double RecallAtK(const SuggestionSet& suggestions, const Workflow& expected);

Json ToJson(const SuggestionSet& suggestions);

}  // namespace flowsim

#endif  // FLOWSIM_RETRIEVAL_H_
