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

#include "flowsim/features.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "flowsim/errors.h"

namespace flowsim {
namespace {

std::string Trim(std::string_view text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = text.find_last_not_of(" \t\r");
  return std::string(text.substr(begin, end - begin + 1));
}

// Feature CSVs hold identifiers and bits; quoted fields are not supported.
std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

FeatureAverage MeanWhere(const FeatureMatrix& m, std::string label,
                         const std::vector<std::size_t>& columns) {
  FeatureAverage out;
  out.feature = std::move(label);
  double sum = 0.0;
  // rows() is ordered by sample id.
  for (const auto& [id, bits] : m.rows()) {
    const bool hit = std::any_of(columns.begin(), columns.end(),
                                 [&](std::size_t c) { return bits[c] != 0; });
    if (!hit) continue;
    ++out.n;
    sum += m.scores().at(id);
  }
  if (out.n > 0) out.mean = sum / static_cast<double>(out.n);
  return out;
}

void FlagRow(ComparisonRow& row) {
  std::vector<double> distinct;
  for (const auto& mean : row.means) {
    if (mean) distinct.push_back(*mean);
  }
  std::sort(distinct.begin(), distinct.end(), std::greater<>());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  row.best.assign(row.means.size(), false);
  row.second.assign(row.means.size(), false);
  for (std::size_t i = 0; i < row.means.size(); ++i) {
    if (!row.means[i]) continue;
    if (!distinct.empty() && *row.means[i] == distinct[0]) row.best[i] = true;
    if (distinct.size() > 1 && *row.means[i] == distinct[1]) row.second[i] = true;
  }
}

Json OptionalToJson(const std::optional<double>& value) {
  return value ? Json(*value) : Json(nullptr);
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::vector<std::string> features,
                             std::map<std::string, std::vector<std::uint8_t>> rows,
                             std::map<std::string, double> scores)
    : features_(std::move(features)), rows_(std::move(rows)) {
  std::set<std::string_view> seen;
  for (const std::string& f : features_) {
    if (f.empty()) throw SchemaError("features", "empty feature id");
    if (!seen.insert(f).second) throw SchemaError("features", "duplicate feature '" + f + "'");
  }
  std::string missing;
  for (const auto& [id, bits] : rows_) {
    if (bits.size() != features_.size()) {
      throw SchemaError("rows." + id, "expected " + std::to_string(features_.size()) +
                                          " entries, got " + std::to_string(bits.size()));
    }
    for (std::uint8_t bit : bits) {
      if (bit > 1) throw SchemaError("rows." + id, "entries must be 0 or 1");
    }
    auto score = scores.find(id);
    if (score == scores.end()) {
      missing += (missing.empty() ? "" : ", ") + id;
      continue;
    }
    scores_.emplace(id, score->second);
  }
  if (!missing.empty()) throw SampleSetMismatch("no score for: " + missing);
}

std::map<std::string, std::vector<std::uint8_t>> FeatureMatrix::ParseCsv(
    std::string_view text, std::vector<std::string>* features) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool have_header = false;
  std::map<std::string, std::vector<std::uint8_t>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    std::vector<std::string> fields = SplitCsvLine(line);
    if (!have_header) {
      if (fields.front() != "sample_id") {
        throw SchemaError(where, "header must start with sample_id");
      }
      features->assign(fields.begin() + 1, fields.end());
      have_header = true;
      continue;
    }
    if (fields.size() != features->size() + 1) {
      throw SchemaError(where, "expected " + std::to_string(features->size() + 1) +
                                   " fields, got " + std::to_string(fields.size()));
    }
    std::vector<std::uint8_t> bits;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (fields[i] != "0" && fields[i] != "1") {
        throw SchemaError(where, "entry '" + fields[i] + "' is not 0 or 1");
      }
      bits.push_back(fields[i] == "1" ? 1 : 0);
    }
    if (!rows.emplace(fields.front(), std::move(bits)).second) {
      throw DuplicateId("duplicate sample id '" + fields.front() + "'");
    }
  }
  if (!have_header) throw SchemaError("", "feature matrix has no header");
  return rows;
}

FeatureMatrix FeatureMatrix::FromCsv(std::string_view text,
                                     const std::map<std::string, double>& scores) {
  std::vector<std::string> features;
  auto rows = ParseCsv(text, &features);
  return FeatureMatrix(std::move(features), std::move(rows), scores);
}

FeatureMatrix FeatureMatrix::Load(const std::string& path,
                                  const std::map<std::string, double>& scores) {
  return FromCsv(ReadFile(path), scores);
}

std::size_t FeatureMatrix::FeatureIndex(std::string_view feature) const {
  auto it = std::find(features_.begin(), features_.end(), feature);
  if (it == features_.end()) {
    throw std::out_of_range("unknown feature '" + std::string(feature) + "'");
  }
  return static_cast<std::size_t>(it - features_.begin());
}

std::map<std::string, double> ScoresFromReport(const EvalReport& report, FlowSimMode mode,
                                               bool gated) {
  std::map<std::string, double> scores;
  for (const SampleRecord& r : report.records) {
    const FlowSimScore& s = mode == FlowSimMode::kOutline
                                ? (gated ? r.gated_outline : r.flow_sim_outline)
                                : (gated ? r.gated_full : r.flow_sim_full);
    scores[r.id] = s.value;
  }
  return scores;
}

std::vector<FeatureAverage> FeatureAverages(const FeatureMatrix& m) {
  std::vector<FeatureAverage> out;
  for (std::size_t i = 0; i < m.features().size(); ++i) {
    out.push_back(MeanWhere(m, m.features()[i], {i}));
  }
  return out;
}

FeatureAverage GroupAverage(const FeatureMatrix& m, const FeatureGroup& group) {
  std::vector<std::size_t> columns;
  for (const std::string& member : group.members) {
    try {
      columns.push_back(m.FeatureIndex(member));
    } catch (const std::out_of_range&) {
      throw SchemaError("groups." + group.name, "unknown feature '" + member + "'");
    }
  }
  return MeanWhere(m, group.name, columns);
}

ComparisonTable RankModels(const std::map<std::string, FeatureMatrix>& per_model,
                           const std::vector<FeatureGroup>& groups) {
  ComparisonTable table;
  if (per_model.empty()) return table;
  const FeatureMatrix& first = per_model.begin()->second;
  for (const auto& [model, m] : per_model) {
    table.models.push_back(model);
    if (m.features() != first.features()) {
      throw SampleSetMismatch("model '" + model + "' uses a different feature list");
    }
    const bool same_ids = std::equal(
        m.rows().begin(), m.rows().end(), first.rows().begin(), first.rows().end(),
        [](const auto& a, const auto& b) { return a.first == b.first; });
    if (!same_ids) {
      throw SampleSetMismatch("model '" + model + "' covers different samples than '" +
                              table.models.front() + "'");
    }
    if (m.rows() != first.rows()) {
      throw SampleSetMismatch("model '" + model + "' labels samples differently");
    }
  }

  std::vector<std::vector<FeatureAverage>> per_feature;
  for (const auto& [model, m] : per_model) per_feature.push_back(FeatureAverages(m));

  // A group row goes right after the last of its members.
  std::map<std::size_t, std::vector<const FeatureGroup*>> groups_after;
  for (const FeatureGroup& g : groups) {
    std::size_t last = 0;
    for (const std::string& member : g.members) {
      try {
        last = std::max(last, first.FeatureIndex(member));
      } catch (const std::out_of_range&) {
        throw SchemaError("groups." + g.name, "unknown feature '" + member + "'");
      }
    }
    groups_after[last].push_back(&g);
  }

  for (std::size_t f = 0; f < first.features().size(); ++f) {
    ComparisonRow row;
    row.label = first.features()[f];
    row.n = per_feature.front()[f].n;
    for (const auto& averages : per_feature) row.means.push_back(averages[f].mean);
    FlagRow(row);
    table.rows.push_back(std::move(row));
    for (const FeatureGroup* g : groups_after[f]) {
      ComparisonRow group_row;
      group_row.label = g->name;
      group_row.is_group = true;
      for (const auto& [model, m] : per_model) {
        const FeatureAverage avg = GroupAverage(m, *g);
        group_row.n = avg.n;
        group_row.means.push_back(avg.mean);
      }
      FlagRow(group_row);
      table.rows.push_back(std::move(group_row));
    }
  }
  return table;
}

std::string RenderComparisonMarkdown(const ComparisonTable& table, int decimals) {
  std::ostringstream out;
  out << "| Feature | n |";
  for (const std::string& model : table.models) out << ' ' << model << " |";
  out << "\n|---|---|";
  for (std::size_t i = 0; i < table.models.size(); ++i) out << "---|";
  out << '\n';
  for (const ComparisonRow& row : table.rows) {
    out << "| " << (row.is_group ? "*" + row.label + "*" : row.label) << " | " << row.n
        << " |";
    for (std::size_t i = 0; i < row.means.size(); ++i) {
      if (!row.means[i]) {
        out << " - |";
        continue;
      }
      std::string cell = FormatNumber(*row.means[i], decimals);
      if (row.best[i]) cell = "**" + cell + "**";
      if (row.second[i]) cell = "<u>" + cell + "</u>";
      out << ' ' << cell << " |";
    }
    out << '\n';
  }
  return out.str();
}

Json ToJson(const ComparisonTable& table) {
  Json rows = Json::array();
  for (const ComparisonRow& row : table.rows) {
    Json means = Json::array();
    for (const auto& mean : row.means) means.push_back(OptionalToJson(mean));
    rows.push_back({{"label", row.label},
                    {"group", row.is_group},
                    {"n", row.n},
                    {"means", std::move(means)},
                    {"best", row.best},
                    {"second", row.second}});
  }
  return {{"models", table.models}, {"rows", std::move(rows)}};
}

Json ToJson(const std::vector<FeatureAverage>& averages) {
  Json out = Json::array();
  for (const FeatureAverage& a : averages) {
    out.push_back({{"feature", a.feature}, {"n", a.n}, {"mean", OptionalToJson(a.mean)}});
  }
  return out;
}

FeatureVocabulary FeatureVocabularyFromJson(const Json& node) {
  FeatureVocabulary vocabulary;
  try {
    for (const Json& g : node.at("groups")) {
      FeatureGroup group;
      group.name = g.at("name").get<std::string>();
      for (const Json& f : g.at("features")) {
        group.members.push_back(f.is_object() ? f.at("id").get<std::string>()
                                              : f.get<std::string>());
      }
      vocabulary.groups.push_back(std::move(group));
    }
  } catch (const Json::exception& e) {
    throw SchemaError("groups", e.what());
  }
  return vocabulary;
}

FeatureVocabulary LoadFeatureVocabulary(const std::string& path) {
  Json node;
  try {
    node = Json::parse(ReadFile(path));
  } catch (const Json::parse_error& e) {
    throw SyntaxError(path + ": " + e.what());
  }
  return FeatureVocabularyFromJson(node);
}

}  // namespace flowsim
