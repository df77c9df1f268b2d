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

#include "flowsim/eval.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "flowsim/errors.h"

namespace flowsim {
namespace {

std::string RequireString(const Json& node, const char* key, const std::string& where) {
  auto it = node.find(key);
  if (it == node.end() || !it->is_string()) {
    throw SchemaError(where + "." + key, "expected a string");
  }
  return it->get<std::string>();
}

std::string JoinPath(const std::string& prefix, const std::string& path) {
  return path.empty() ? prefix : prefix + "." + path;
}

EvalSample SampleFromJsonAt(const Json& node, const std::string& where) {
  if (!node.is_object()) throw SchemaError(where, "sample must be an object");
  EvalSample sample;
  sample.id = RequireString(node, "id", where);
  sample.requirement = RequireString(node, "requirement", where);
  if (auto tag = node.find("split_tag"); tag != node.end() && !tag->is_null()) {
    if (!tag->is_string()) throw SchemaError(where + ".split_tag", "expected a string");
    sample.split_tag = tag->get<std::string>();
  }
  auto expected = node.find("expected");
  if (expected == node.end()) throw SchemaError(where + ".expected", "missing");
  try {
    sample.expected = WorkflowFromJson(*expected);
  } catch (const SchemaError& e) {
    throw SchemaError(JoinPath(where + ".expected", e.path()), e.message());
  }
  if (auto generated = node.find("generated");
      generated != node.end() && !generated->is_null()) {
    try {
      sample.generated = WorkflowFromJson(*generated, ParseOptions{.lenient = true});
    } catch (const SchemaError& e) {
      throw SchemaError(JoinPath(where + ".generated", e.path()), e.message());
    }
  }
  return sample;
}

void CheckUniqueIds(const std::vector<EvalSample>& samples) {
  std::set<std::string_view> seen;
  for (const EvalSample& sample : samples) {
    if (!seen.insert(sample.id).second) {
      throw DuplicateId("duplicate sample id '" + sample.id + "'");
    }
  }
}

Json ScoreToJson(const FlowSimScore& score) {
  return {{"value", score.value},
          {"distance", score.distance},
          {"normalizer", score.normalizer},
          {"gated", score.gated}};
}

FlowSimScore ScoreFromJson(const Json& node, FlowSimMode mode) {
  FlowSimScore score;
  score.mode = mode;
  score.value = node.at("value").get<double>();
  score.distance = node.at("distance").get<std::int64_t>();
  score.normalizer = node.at("normalizer").get<std::int64_t>();
  score.gated = node.at("gated").get<bool>();
  return score;
}

Json AggregatesToJson(const Aggregates& a) {
  return {{"n", a.n},
          {"mean_outline", a.mean_outline},
          {"mean_full", a.mean_full},
          {"structure_error_rate", a.structure_error_rate},
          {"gated_mean_outline", a.gated_mean_outline},
          {"gated_mean_full", a.gated_mean_full}};
}

Aggregates AggregatesFromJson(const Json& node) {
  Aggregates a;
  a.n = node.at("n").get<std::size_t>();
  a.mean_outline = node.at("mean_outline").get<double>();
  a.mean_full = node.at("mean_full").get<double>();
  a.structure_error_rate = node.at("structure_error_rate").get<double>();
  a.gated_mean_outline = node.at("gated_mean_outline").get<double>();
  a.gated_mean_full = node.at("gated_mean_full").get<double>();
  return a;
}

SampleRecord ScoreSample(const EvalSample& sample, const EvalConfig& config) {
  SampleRecord record;
  record.id = sample.id;
  record.split_tag = sample.split_tag;
  const Workflow& generated = *sample.generated;
  record.flow_sim_outline =
      FlowSim(sample.expected, generated, FlowSimMode::kOutline, config.flow_sim);
  record.flow_sim_full =
      FlowSim(sample.expected, generated, FlowSimMode::kOutlineAndInputs, config.flow_sim);
  record.structure = ValidateStructure(generated, config.rules, sample.id);
  record.gated_outline = record.flow_sim_outline;
  record.gated_full = record.flow_sim_full;
  if (config.gate) {
    const ScoredSample scored{sample.id, record.flow_sim_outline, record.flow_sim_full};
    const auto gated = ApplyStructureGate(std::span(&scored, 1),
                                          std::span(&record.structure, 1));
    record.gated_outline = gated.front().outline;
    record.gated_full = gated.front().full;
  }
  return record;
}

// CSV fields here are ids and tags; quote only when needed.
std::string CsvField(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string MarkdownCell(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

std::string JoinRuleIds(const StructureReport& report) {
  std::string out;
  for (const Violation& v : report.violations) {
    if (!out.empty()) out += ';';
    out += v.rule_id + "@" + v.step_id;
  }
  return out;
}

std::string RenderCsv(const EvalReport& report) {
  std::ostringstream out;
  out << "id,split_tag,flow_sim_outline,flow_sim_full,gated_outline,gated_full,"
         "structure_errors,violations\n";
  for (const SampleRecord& r : report.records) {
    out << CsvField(r.id) << ',' << CsvField(r.split_tag) << ','
        << FormatNumber(r.flow_sim_outline.value, 4) << ','
        << FormatNumber(r.flow_sim_full.value, 4) << ','
        << FormatNumber(r.gated_outline.value, 4) << ','
        << FormatNumber(r.gated_full.value, 4) << ',' << r.structure.violations.size()
        << ',' << CsvField(JoinRuleIds(r.structure)) << '\n';
  }
  out << "aggregate,n,mean_outline,mean_full,gated_mean_outline,gated_mean_full,"
         "structure_error_rate,\n";
  for (const auto& [group, a] : report.aggregates) {
    out << CsvField(group) << ',' << a.n << ',' << FormatNumber(a.mean_outline, 4) << ','
        << FormatNumber(a.mean_full, 4) << ',' << FormatNumber(a.gated_mean_outline, 4)
        << ',' << FormatNumber(a.gated_mean_full, 4) << ','
        << FormatNumber(a.structure_error_rate, 4) << ",\n";
  }
  return out.str();
}

void MarkdownAggregates(std::ostringstream& out, const Aggregates& a) {
  out << "| n | FlowSim outline | FlowSim full | gated outline | gated full | "
         "structure error rate |\n"
      << "|---|---|---|---|---|---|\n"
      << "| " << a.n << " | " << FormatNumber(a.mean_outline, 2) << " | "
      << FormatNumber(a.mean_full, 2) << " | " << FormatNumber(a.gated_mean_outline, 2)
      << " | " << FormatNumber(a.gated_mean_full, 2) << " | "
      << FormatNumber(100.0 * a.structure_error_rate, 2) << "% |\n\n";
}

std::string RenderMarkdown(const EvalReport& report) {
  std::ostringstream out;
  out << "# FlowSim evaluation report\n\n";
  out << "Normalizer: " << report.normalizer << ". Structure gate: "
      << (report.gate ? "on" : "off") << ". Rules: ";
  for (std::size_t i = 0; i < report.rules.size(); ++i) {
    out << (i ? ", " : "") << report.rules[i];
  }
  out << ".\n\n## " << kAllSamples << "\n\n";
  if (auto it = report.aggregates.find(std::string(kAllSamples));
      it != report.aggregates.end()) {
    MarkdownAggregates(out, it->second);
  }

  std::map<std::string, std::vector<const SampleRecord*>> by_tag;
  for (const SampleRecord& r : report.records) by_tag[r.split_tag].push_back(&r);
  for (const auto& [tag, records] : by_tag) {
    out << "## " << (tag.empty() ? "(untagged)" : MarkdownCell(tag)) << "\n\n";
    if (auto it = report.aggregates.find(tag);
        !tag.empty() && it != report.aggregates.end()) {
      MarkdownAggregates(out, it->second);
    }
    out << "| id | outline | full | gated outline | gated full | violations |\n"
        << "|---|---|---|---|---|---|\n";
    for (const SampleRecord* r : records) {
      out << "| " << MarkdownCell(r->id) << " | " << FormatNumber(r->flow_sim_outline.value, 2)
          << " | " << FormatNumber(r->flow_sim_full.value, 2) << " | "
          << FormatNumber(r->gated_outline.value, 2) << " | "
          << FormatNumber(r->gated_full.value, 2) << " | "
          << MarkdownCell(JoinRuleIds(r->structure)) << " |\n";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

EvalSample SampleFromJson(const Json& node) { return SampleFromJsonAt(node, "sample"); }

Json ToJson(const EvalSample& sample) {
  Json node = {{"id", sample.id},
               {"requirement", sample.requirement},
               {"split_tag", sample.split_tag},
               {"expected", WorkflowToJson(sample.expected)}};
  if (sample.generated) node["generated"] = WorkflowToJson(*sample.generated);
  return node;
}

std::vector<EvalSample> ParseDatasetJsonl(std::string_view text) {
  std::vector<EvalSample> samples;
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
    samples.push_back(SampleFromJsonAt(node, where));
  }
  CheckUniqueIds(samples);
  return samples;
}

std::vector<EvalSample> LoadDataset(const std::string& path, DatasetFormat format) {
  if (format == DatasetFormat::kJsonl) return ParseDatasetJsonl(ReadFile(path));

  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(path, ec)) throw IoError("not a directory: " + path);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  if (ec) throw IoError("cannot list " + path + ": " + ec.message());
  std::sort(files.begin(), files.end());

  std::vector<EvalSample> samples;
  for (const fs::path& file : files) {
    const std::string where = file.filename().string();
    Json node;
    try {
      node = Json::parse(ReadFile(file.string()));
    } catch (const Json::parse_error& e) {
      throw SyntaxError(where + ": " + e.what());
    }
    samples.push_back(SampleFromJsonAt(node, where));
  }
  CheckUniqueIds(samples);
  return samples;
}

std::string DatasetToJsonl(std::span<const EvalSample> samples) {
  std::string out;
  for (const EvalSample& sample : samples) {
    out += ToJson(sample).dump();
    out += '\n';
  }
  return out;
}

Aggregates ComputeAggregates(std::span<const SampleRecord> records) {
  std::vector<const SampleRecord*> sorted;
  sorted.reserve(records.size());
  for (const SampleRecord& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const SampleRecord* a, const SampleRecord* b) { return a->id < b->id; });

  Aggregates a;
  a.n = sorted.size();
  if (a.n == 0) return a;
  std::size_t broken = 0;
  for (const SampleRecord* r : sorted) {
    a.mean_outline += r->flow_sim_outline.value;
    a.mean_full += r->flow_sim_full.value;
    a.gated_mean_outline += r->gated_outline.value;
    a.gated_mean_full += r->gated_full.value;
    if (r->structure.has_errors()) ++broken;
  }
  const double n = static_cast<double>(a.n);
  a.mean_outline /= n;
  a.mean_full /= n;
  a.gated_mean_outline /= n;
  a.gated_mean_full /= n;
  a.structure_error_rate = static_cast<double>(broken) / n;
  return a;
}

std::map<std::string, Aggregates> GroupAggregates(std::span<const SampleRecord> records) {
  std::map<std::string, std::vector<SampleRecord>> by_tag;
  for (const SampleRecord& r : records) {
    if (!r.split_tag.empty()) by_tag[r.split_tag].push_back(r);
  }
  std::map<std::string, Aggregates> out;
  out[std::string(kAllSamples)] = ComputeAggregates(records);
  for (const auto& [tag, group] : by_tag) {
    if (tag != kAllSamples) out[tag] = ComputeAggregates(group);
  }
  return out;
}

EvalReport Evaluate(std::span<const EvalSample> samples, const EvalConfig& config) {
  std::string missing;
  for (const EvalSample& sample : samples) {
    if (!sample.generated) missing += (missing.empty() ? "" : ", ") + sample.id;
  }
  if (!missing.empty()) throw MissingGenerated("no generated workflow for: " + missing);
  {
    std::set<std::string_view> seen;
    for (const EvalSample& sample : samples) {
      if (!seen.insert(sample.id).second) {
        throw DuplicateId("duplicate sample id '" + sample.id + "'");
      }
    }
  }

  std::vector<SampleRecord> records(samples.size());
  const std::size_t workers =
      std::min<std::size_t>(std::max(1, config.threads), std::max<std::size_t>(1, samples.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      records[i] = ScoreSample(samples[i], config);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < samples.size(); i = next++) {
            try {
              records[i] = ScoreSample(samples[i], config);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  std::sort(records.begin(), records.end(),
            [](const SampleRecord& a, const SampleRecord& b) { return a.id < b.id; });

  EvalReport report;
  report.gate = config.gate;
  report.normalizer = config.flow_sim.normalizer == Normalizer::kMaxSize ? "max" : "sum";
  report.include_annotations = config.flow_sim.tree.include_annotations;
  for (const StructureRule& rule : config.rules.rules) report.rules.push_back(rule.id);
  report.aggregates = GroupAggregates(records);
  report.records = std::move(records);
  return report;
}

std::optional<ReportFormat> ParseReportFormat(std::string_view text) {
  if (text == "json") return ReportFormat::kJson;
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "md" || text == "markdown") return ReportFormat::kMarkdown;
  return std::nullopt;
}

Json ToJson(const EvalReport& report) {
  Json samples = Json::array();
  for (const SampleRecord& r : report.records) {
    samples.push_back({{"id", r.id},
                       {"split_tag", r.split_tag},
                       {"flow_sim_outline", ScoreToJson(r.flow_sim_outline)},
                       {"flow_sim_full", ScoreToJson(r.flow_sim_full)},
                       {"gated_outline", ScoreToJson(r.gated_outline)},
                       {"gated_full", ScoreToJson(r.gated_full)},
                       {"structure", ToJson(r.structure)}});
  }
  Json aggregates = Json::object();
  for (const auto& [group, a] : report.aggregates) aggregates[group] = AggregatesToJson(a);
  return {{"config",
           {{"gate", report.gate},
            {"normalizer", report.normalizer},
            {"include_annotations", report.include_annotations},
            {"rules", report.rules}}},
          {"samples", std::move(samples)},
          {"aggregates", std::move(aggregates)}};
}

EvalReport EvalReportFromJson(const Json& node) {
  EvalReport report;
  try {
    const Json& config = node.at("config");
    report.gate = config.at("gate").get<bool>();
    report.normalizer = config.at("normalizer").get<std::string>();
    report.include_annotations = config.value("include_annotations", false);
    report.rules = config.at("rules").get<std::vector<std::string>>();
    for (const Json& s : node.at("samples")) {
      SampleRecord r;
      r.id = s.at("id").get<std::string>();
      r.split_tag = s.value("split_tag", "");
      r.flow_sim_outline = ScoreFromJson(s.at("flow_sim_outline"), FlowSimMode::kOutline);
      r.flow_sim_full = ScoreFromJson(s.at("flow_sim_full"), FlowSimMode::kOutlineAndInputs);
      r.gated_outline = ScoreFromJson(s.at("gated_outline"), FlowSimMode::kOutline);
      r.gated_full = ScoreFromJson(s.at("gated_full"), FlowSimMode::kOutlineAndInputs);
      r.structure = StructureReportFromJson(s.at("structure"));
      report.records.push_back(std::move(r));
    }
    for (const auto& [group, a] : node.at("aggregates").items()) {
      report.aggregates[group] = AggregatesFromJson(a);
    }
  } catch (const Json::exception& e) {
    throw SchemaError("report", e.what());
  }
  return report;
}

std::string RenderReport(const EvalReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kJson:
      return ToJson(report).dump(2) + "\n";
    case ReportFormat::kCsv:
      return RenderCsv(report);
    case ReportFormat::kMarkdown:
      return RenderMarkdown(report);
  }
  return {};
}

void EmitReport(const EvalReport& report, ReportFormat format, const std::string& path) {
  WriteFile(path, RenderReport(report, format));
}

std::string FormatNumber(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  std::string out = buffer;
  // Avoid "-0.00".
  if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-') {
    out.erase(0, 1);
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace flowsim
