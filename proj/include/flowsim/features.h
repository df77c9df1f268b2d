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

// Binary feature matrices for error analysis. Features are labeled by hand
// and loaded from CSV; scores are joined by sample id.

#ifndef FLOWSIM_FEATURES_H_
#define FLOWSIM_FEATURES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flowsim/eval.h"
#include "flowsim/workflow.h"

namespace flowsim {

class FeatureMatrix {
 public:
  // Throws SchemaError when a row has the wrong width or a non-binary entry,
  // and SampleSetMismatch when a row has no score.
  FeatureMatrix(std::vector<std::string> features,
                std::map<std::string, std::vector<std::uint8_t>> rows,
                std::map<std::string, double> scores);

  // Header `sample_id,<feature>...`, one 0/1 row per sample.
  static std::map<std::string, std::vector<std::uint8_t>> ParseCsv(
      std::string_view text, std::vector<std::string>* features);
  static FeatureMatrix FromCsv(std::string_view text, const std::map<std::string, double>& scores);
  static FeatureMatrix Load(const std::string& path, const std::map<std::string, double>& scores);

  const std::vector<std::string>& features() const { return features_; }
  const std::map<std::string, std::vector<std::uint8_t>>& rows() const { return rows_; }
  const std::map<std::string, double>& scores() const { return scores_; }

  // Throws std::out_of_range for an unknown feature.
  std::size_t FeatureIndex(std::string_view feature) const;

 private:
  std::vector<std::string> features_;
  std::map<std::string, std::vector<std::uint8_t>> rows_;
  std::map<std::string, double> scores_;
};

// Per-sample score from a report, e.g. for joining with a feature matrix.
std::map<std::string, double> ScoresFromReport(const EvalReport& report, FlowSimMode mode,
                                               bool gated);

struct FeatureAverage {
  std::string feature;
  std::size_t n = 0;
  // Absent when no sample has the feature.
  std::optional<double> mean;

  bool operator==(const FeatureAverage&) const = default;
};

struct FeatureGroup {
  std::string name;
  std::vector<std::string> members;
};

// In feature order. Sums run in sample id order.
std::vector<FeatureAverage> FeatureAverages(const FeatureMatrix& m);

// Mean over the samples having at least one of the group's features.
FeatureAverage GroupAverage(const FeatureMatrix& m, const FeatureGroup& group);

struct ComparisonRow {
  std::string label;
  bool is_group = false;
  std::size_t n = 0;
  // One entry per model, in ComparisonTable::models order.
  std::vector<std::optional<double>> means;
  std::vector<bool> best;
  std::vector<bool> second;
};

struct ComparisonTable {
  std::vector<std::string> models;
  std::vector<ComparisonRow> rows;
};

// One matrix per model over the same samples and features; throws
// SampleSetMismatch otherwise. Each group's row follows its last member.
// Equal means share a flag; the second flag goes to the next distinct value.
ComparisonTable RankModels(const std::map<std::string, FeatureMatrix>& per_model,
                           const std::vector<FeatureGroup>& groups = {});

// Bold for best, <u>underline</u> for second.
std::string RenderComparisonMarkdown(const ComparisonTable& table, int decimals = 2);

Json ToJson(const ComparisonTable& table);
Json ToJson(const std::vector<FeatureAverage>& averages);

struct FeatureVocabulary {
  std::vector<FeatureGroup> groups;
};

// {"groups": [{"name", "features": [...]}]}.
FeatureVocabulary FeatureVocabularyFromJson(const Json& node);
FeatureVocabulary LoadFeatureVocabulary(const std::string& path);

}  // namespace flowsim

#endif  // FLOWSIM_FEATURES_H_
