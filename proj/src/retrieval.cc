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

#include "flowsim/retrieval.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "flowsim/errors.h"

namespace flowsim {
namespace {

const std::unordered_set<std::string_view>& Stopwords() {
  static const std::unordered_set<std::string_view> words = {
      "a",    "an",   "the",  "is",    "are",  "be",   "been", "of",
      "to",   "in",   "on",   "for",   "and",  "or",   "it",   "its",
      "them", "their", "they", "this", "that", "these", "those", "with",
      "as",   "by",   "at",   "from",  "every", "all", "any",  "where",
      "when", "then", "there", "which", "who",  "whose", "into", "if"};
  return words;
}

constexpr std::string_view kNegationPrefixes[] = {"non", "dis", "in", "un"};

const std::set<std::string, std::less<>> kFalseLike = {"false", "0", "no", "n"};
const std::set<std::string, std::less<>> kTrueLike = {"true", "1", "yes", "y"};

std::string Stem(std::string token) {
  if (token.size() > 4 && token.ends_with("ies")) {
    token.resize(token.size() - 3);
    token += 'y';
  } else if (token.size() > 3 && token.back() == 's' && !token.ends_with("ss")) {
    token.pop_back();
  }
  return token;
}

// Raw lowercase words, stopwords kept; used for negation detection.
std::vector<std::string> Words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) words.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (!std::isalnum(c)) {
      flush();
      continue;
    }
    if (std::isupper(c) && i > 0 &&
        std::islower(static_cast<unsigned char>(text[i - 1]))) {
      flush();
    }
    current.push_back(static_cast<char>(std::tolower(c)));
  }
  flush();
  return words;
}

double MatchStrength(std::string_view q, std::string_view t) {
  if (q == t) return 1.0;
  const std::string_view& shorter = q.size() < t.size() ? q : t;
  const std::string_view& longer = q.size() < t.size() ? t : q;
  if (shorter.size() >= 4 && longer.find(shorter) != std::string_view::npos) {
    return 0.5;
  }
  return 0.0;
}

// Names are more specific than free-text descriptions.
constexpr double kDescriptionWeight = 0.5;

void AddDoc(StepCatalog::Family& family, Suggestion doc,
            std::initializer_list<std::pair<std::string_view, double>> fields) {
  const std::size_t id = family.docs.size();
  family.docs.push_back(std::move(doc));
  std::map<std::string, double> best;
  for (const auto& [text, weight] : fields) {
    for (std::string& token : Tokenize(text)) {
      double& w = best[std::move(token)];
      w = std::max(w, weight);
    }
  }
  for (auto& [token, weight] : best) {
    family.postings[token].push_back({id, weight});
  }
  family.token_counts.push_back(best.size());
  family.polarity_column.emplace_back();
  family.polarity.push_back(0);
}

struct Query {
  std::vector<std::string> tokens;  // distinct, sorted
  // Query token -> column word it negates ("inactive" -> "active").
  std::map<std::string, std::string> negates;
  // Query tokens that name something without negation.
  std::set<std::string> plain;
};

Query ParseQuery(std::string_view text) {
  Query query;
  const auto tokens = Tokenize(text);
  query.tokens.assign(tokens.begin(), tokens.end());
  std::sort(query.tokens.begin(), query.tokens.end());
  query.tokens.erase(std::unique(query.tokens.begin(), query.tokens.end()),
                     query.tokens.end());

  const auto words = Words(text);
  std::set<std::string> negated_by_bigram;
  for (std::size_t i = 0; i + 1 < words.size(); ++i) {
    if (words[i] == "not" || words[i] == "no") {
      negated_by_bigram.insert(Stem(words[i + 1]));
    }
  }
  for (const std::string& token : query.tokens) {
    if (negated_by_bigram.count(token) != 0) {
      query.negates[token] = token;
      continue;
    }
    query.plain.insert(token);
    for (std::string_view prefix : kNegationPrefixes) {
      if (token.size() >= prefix.size() + 4 && token.starts_with(prefix)) {
        query.negates[token] = token.substr(prefix.size());
        break;
      }
    }
  }
  return query;
}

// Full-strength polarity match of query token q against value doc `doc`.
bool PolarityMatch(const StepCatalog::Family& family, std::size_t doc,
                   const std::string& q, const Query& query) {
  const int polarity = family.polarity[doc];
  if (polarity == 0) return false;
  const auto column_words = Tokenize(family.polarity_column[doc]);
  auto names_column = [&](const std::string& word) {
    return std::find(column_words.begin(), column_words.end(), word) !=
           column_words.end();
  };
  if (polarity < 0) {
    auto it = query.negates.find(q);
    return it != query.negates.end() && names_column(it->second);
  }
  return query.plain.count(q) != 0 && query.negates.count(q) == 0 &&
         names_column(q);
}

std::vector<Suggestion> Rank(const StepCatalog::Family& family, const Query& query,
                             std::size_t k) {
  const std::size_t n = family.docs.size();
  std::vector<double> numerator(n, 0.0);
  double denominator = 0.0;
  std::vector<double> match(n);
  for (const std::string& q : query.tokens) {
    std::fill(match.begin(), match.end(), 0.0);
    for (const auto& [token, postings] : family.postings) {
      const double strength = MatchStrength(q, token);
      if (strength == 0.0) continue;
      for (const auto& posting : postings) {
        match[posting.doc] = std::max(match[posting.doc], strength * posting.weight);
      }
    }
    for (std::size_t d = 0; d < n; ++d) {
      if (PolarityMatch(family, d, q, query)) match[d] = 1.0;
    }
    const auto df = std::count_if(match.begin(), match.end(), [](double m) { return m > 0; });
    const double weight = df == 0 ? 1.0 : 1.0 / (1.0 + std::log(static_cast<double>(df)));
    denominator += weight;
    for (std::size_t d = 0; d < n; ++d) numerator[d] += weight * match[d];
  }

  std::vector<std::size_t> order;
  for (std::size_t d = 0; d < n; ++d) {
    numerator[d] = denominator > 0 ? numerator[d] / denominator : 0.0;
    // Entries with no evidence are not suggestions.
    if (numerator[d] > 0.0) order.push_back(d);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (numerator[a] != numerator[b]) return numerator[a] > numerator[b];
    if (family.token_counts[a] != family.token_counts[b]) {
      return family.token_counts[a] < family.token_counts[b];
    }
    if (family.docs[a].name != family.docs[b].name) {
      return family.docs[a].name < family.docs[b].name;
    }
    return family.docs[a].parent < family.docs[b].parent;
  });
  if (order.size() > k) order.resize(k);
  std::vector<Suggestion> ranked;
  for (std::size_t d : order) {
    ranked.push_back(family.docs[d]);
    ranked.back().score = numerator[d];
  }
  return ranked;
}

void SortSuggestions(std::vector<Suggestion>& list) {
  std::sort(list.begin(), list.end(), [](const Suggestion& a, const Suggestion& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.name != b.name) return a.name < b.name;
    return a.parent < b.parent;
  });
}

// Keeps the best-scoring entry per name; installations may share names.
std::vector<Suggestion> DedupeByName(std::vector<Suggestion> list) {
  std::set<std::string> seen;
  std::vector<Suggestion> out;
  for (Suggestion& s : list) {
    if (seen.insert(s.name).second) out.push_back(std::move(s));
  }
  return out;
}

Json SuggestionsToJson(const std::vector<Suggestion>& list) {
  Json out = Json::array();
  for (const Suggestion& s : list) {
    Json item = {{"name", s.name}, {"score", s.score}};
    if (!s.parent.empty()) item["parent"] = s.parent;
    out.push_back(std::move(item));
  }
  return out;
}

StepEntry StepEntryFromJson(const Json& node) {
  StepEntry entry;
  entry.step_name = node.at("name").get<std::string>();
  entry.description = node.value("description", "");
  const std::string kind = node.value("kind", "action");
  if (kind == "flowlogic") {
    entry.kind = StepKind::kFlowLogic;
  } else if (kind != "action") {
    throw SchemaError("kind", "unknown step kind '" + kind + "'");
  }
  entry.installation_tag = node.value("installation", "");
  if (auto inputs = node.find("inputs"); inputs != node.end()) {
    entry.inputs.emplace();
    for (const Json& spec : *inputs) {
      entry.inputs->push_back(
          {spec.at("key").get<std::string>(), spec.value("type", "literal")});
    }
  }
  return entry;
}

ArtifactEntry ArtifactEntryFromJson(const Json& node) {
  ArtifactEntry entry;
  entry.table = node.at("name").get<std::string>();
  entry.description = node.value("description", "");
  for (const Json& column : node.value("columns", Json::array())) {
    ColumnEntry c;
    c.name = column.at("name").get<std::string>();
    c.description = column.value("description", "");
    for (const Json& v : column.value("values", Json::array())) {
      c.sample_values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    }
    entry.columns.push_back(std::move(c));
  }
  return entry;
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  for (std::string& word : Words(text)) {
    if (Stopwords().count(word) != 0) continue;
    tokens.push_back(Stem(std::move(word)));
  }
  return tokens;
}

StepCatalog StepCatalog::Index(std::vector<StepEntry> steps,
                               std::vector<ArtifactEntry> artifacts) {
  StepCatalog catalog;
  std::set<std::pair<std::string, std::string>> step_keys;
  for (const StepEntry& entry : steps) {
    if (!step_keys.emplace(entry.installation_tag, entry.step_name).second) {
      throw DuplicateName("duplicate step '" + entry.step_name + "' in installation '" +
                          entry.installation_tag + "'");
    }
  }
  std::set<std::string> tables;
  for (const ArtifactEntry& entry : artifacts) {
    if (!tables.insert(entry.table).second) {
      throw DuplicateName("duplicate table '" + entry.table + "'");
    }
  }
  catalog.steps_ = std::move(steps);
  catalog.artifacts_ = std::move(artifacts);

  for (const StepEntry& entry : catalog.steps_) {
    AddDoc(catalog.step_family_, {entry.step_name, {}, 0.0},
           {{entry.step_name, 1.0}, {entry.description, kDescriptionWeight}});
  }
  for (const ArtifactEntry& table : catalog.artifacts_) {
    AddDoc(catalog.table_family_, {table.table, {}, 0.0},
           {{table.table, 1.0}, {table.description, kDescriptionWeight}});
    for (const ColumnEntry& column : table.columns) {
      AddDoc(catalog.column_family_, {column.name, table.table, 0.0},
             {{column.name, 1.0}, {column.description, kDescriptionWeight}, {table.table, 0.5}});
      for (const std::string& value : column.sample_values) {
        AddDoc(catalog.value_family_, {value, table.table + "." + column.name, 0.0},
               {{value, 1.0}, {column.name, 0.5}, {table.table, 0.25}});
        std::string lower;
        for (char c : value) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        catalog.value_family_.polarity_column.back() = column.name;
        catalog.value_family_.polarity.back() =
            kFalseLike.count(lower) ? -1 : (kTrueLike.count(lower) ? 1 : 0);
      }
    }
  }
  return catalog;
}

StepCatalog StepCatalog::FromJsonLines(std::string_view text) {
  std::vector<StepEntry> steps;
  std::vector<ArtifactEntry> artifacts;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    Json node;
    try {
      node = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw SyntaxError(where + ": " + e.what());
    }
    try {
      const std::string type = node.value("type", "step");
      if (type == "step") {
        steps.push_back(StepEntryFromJson(node));
      } else if (type == "table") {
        artifacts.push_back(ArtifactEntryFromJson(node));
      } else {
        throw SchemaError(where, "unknown catalog entry type '" + type + "'");
      }
    } catch (const Json::exception& e) {
      throw SchemaError(where, e.what());
    }
  }
  return Index(std::move(steps), std::move(artifacts));
}

StepCatalog StepCatalog::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open catalog " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromJsonLines(buffer.str());
}

StepCatalog StepCatalog::ForInstallation(std::string_view tag) const {
  std::vector<StepEntry> steps;
  for (const StepEntry& entry : steps_) {
    if (entry.installation_tag.empty() || entry.installation_tag == tag) {
      steps.push_back(entry);
    }
  }
  return Index(std::move(steps), artifacts_);
}

const StepEntry* StepCatalog::FindStep(std::string_view step_name) const {
  for (const StepEntry& entry : steps_) {
    if (entry.step_name == step_name) return &entry;
  }
  return nullptr;
}

SuggestionSet SuggestSteps(std::string_view requirement, const StepCatalog& catalog,
                           std::size_t k) {
  if (catalog.steps().empty()) throw EmptyCatalog("catalog has no steps");
  SuggestionSet out;
  out.query = std::string(requirement);
  out.k = k;
  const Query query = ParseQuery(requirement);
  out.steps = DedupeByName(Rank(catalog.step_family(), query, catalog.size()));
  if (out.steps.size() > k) out.steps.resize(k);
  return out;
}

SuggestionSet SuggestArtifacts(std::string_view annotation, const StepCatalog& catalog,
                               std::size_t k) {
  if (catalog.artifacts().empty()) throw EmptyCatalog("catalog has no artifacts");
  SuggestionSet out;
  out.query = std::string(annotation);
  out.k = k;
  const Query query = ParseQuery(annotation);
  out.tables = Rank(catalog.table_family(), query, k);
  out.columns = Rank(catalog.column_family(), query, k);
  out.values = Rank(catalog.value_family(), query, k);
  return out;
}

std::vector<std::string> ExpectedStepNames(const Workflow& expected) {
  std::vector<std::string> names;
  for (const WalkEntry& entry : Walk(expected)) {
    if (entry.is_trigger() || entry.step->kind != StepKind::kAction) continue;
    if (std::find(names.begin(), names.end(), entry.step->name) == names.end()) {
      names.push_back(entry.step->name);
    }
  }
  return names;
}

SuggestionSet PerfectRag(const Workflow& expected, const StepCatalog& catalog,
                         std::size_t k, std::string_view query) {
  const auto names = ExpectedStepNames(expected);
  for (const std::string& name : names) {
    if (catalog.FindStep(name) == nullptr) {
      throw MissingStep("expected step '" + name + "' is not in the catalog");
    }
  }
  SuggestionSet lexical = SuggestSteps(query, catalog, catalog.size());
  SuggestionSet out;
  out.query = std::string(query);
  out.k = std::max(k, names.size());

  std::set<std::string> required(names.begin(), names.end());
  std::vector<Suggestion> fillers;
  for (const Suggestion& s : lexical.steps) {
    if (required.erase(s.name) != 0) {
      out.steps.push_back(s);
    } else {
      fillers.push_back(s);
    }
  }
  // Expected steps with no lexical overlap are still included, at score 0.
  for (const std::string& name : required) out.steps.push_back({name, "", 0.0});
  for (Suggestion& s : fillers) {
    if (out.steps.size() >= out.k) break;
    out.steps.push_back(std::move(s));
  }
  SortSuggestions(out.steps);
  return out;
}

double RecallAtK(const SuggestionSet& suggestions, const Workflow& expected) {
  const auto names = ExpectedStepNames(expected);
  if (names.empty()) return 1.0;
  const auto hits = std::count_if(names.begin(), names.end(), [&](const std::string& name) {
    return std::any_of(suggestions.steps.begin(), suggestions.steps.end(),
                       [&](const Suggestion& s) { return s.name == name; });
  });
  return static_cast<double>(hits) / static_cast<double>(names.size());
}

Json ToJson(const SuggestionSet& suggestions) {
  return {{"query", suggestions.query},
          {"k", suggestions.k},
          {"steps", SuggestionsToJson(suggestions.steps)},
          {"tables", SuggestionsToJson(suggestions.tables)},
          {"columns", SuggestionsToJson(suggestions.columns)},
          {"values", SuggestionsToJson(suggestions.values)}};
}

}  // namespace flowsim
