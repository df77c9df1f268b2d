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

#include "flowsim/generator.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

#include "flowsim/errors.h"
#include "httplib.h"

namespace flowsim {
namespace {

class SemaphoreGuard {
 public:
  explicit SemaphoreGuard(std::counting_semaphore<1024>& s) : s_(s) { s_.acquire(); }
  ~SemaphoreGuard() { s_.release(); }
  SemaphoreGuard(const SemaphoreGuard&) = delete;
  SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

 private:
  std::counting_semaphore<1024>& s_;
};

}  // namespace

std::string_view ToString(TaskKind kind) {
  return kind == TaskKind::kCreateFlow ? "createFlow" : "populateInputs";
}

MockGenerator MockGenerator::FromJsonLines(std::string_view text) {
  std::map<std::string, std::string> responses;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json node;
    try {
      node = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw SyntaxError("fixture line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!node.is_object() || !node.contains("key") || !node.contains("response")) {
      throw SchemaError("line " + std::to_string(line_no),
                        "fixture needs \"key\" and \"response\"");
    }
    const Json& response = node["response"];
    responses[node["key"].get<std::string>()] =
        response.is_string() ? response.get<std::string>() : response.dump();
  }
  return MockGenerator(std::move(responses));
}

MockGenerator MockGenerator::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open generator fixtures " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromJsonLines(buffer.str());
}

std::string MockGenerator::Generate(const GenerationRequest& request) {
  auto it = responses_.find(request.key);
  if (it == responses_.end()) {
    throw GeneratorError("no fixture response for '" + request.key + "'");
  }
  return it->second;
}

RemoteGeneratorConfig RemoteGeneratorConfig::FromJson(const Json& node) {
  RemoteGeneratorConfig config;
  config.url = node.at("url").get<std::string>();
  config.model = node.value("model", config.model);
  config.temperature = node.value("temperature", config.temperature);
  config.max_tokens = node.value("max_tokens", config.max_tokens);
  config.timeout = std::chrono::milliseconds(
      node.value("timeout_ms", static_cast<std::int64_t>(config.timeout.count())));
  config.attempts = node.value("attempts", config.attempts);
  config.initial_backoff = std::chrono::milliseconds(node.value(
      "initial_backoff_ms", static_cast<std::int64_t>(config.initial_backoff.count())));
  config.max_in_flight = node.value("max_in_flight", config.max_in_flight);
  config.auth_header = node.value("auth_header", config.auth_header);
  config.auth_value = node.value("auth_value", config.auth_value);
  if (auto env = node.find("auth_value_env"); env != node.end()) {
    if (const char* value = std::getenv(env->get<std::string>().c_str())) {
      config.auth_value = value;
    }
  }
  config.model_field = node.value("model_field", config.model_field);
  config.prompt_field = node.value("prompt_field", config.prompt_field);
  config.temperature_field = node.value("temperature_field", config.temperature_field);
  config.max_tokens_field = node.value("max_tokens_field", config.max_tokens_field);
  config.response_pointer = node.value("response_pointer", config.response_pointer);
  return config;
}

RemoteGenerator::RemoteGenerator(RemoteGeneratorConfig config)
    : config_(std::move(config)),
      in_flight_(std::clamp(config_.max_in_flight, 1, 1024)) {
  const auto scheme = config_.url.find("://");
  if (scheme == std::string::npos) {
    throw SchemaError("url", "endpoint needs a scheme: " + config_.url);
  }
  const auto slash = config_.url.find('/', scheme + 3);
  origin_ = config_.url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : config_.url.substr(slash);
}

RemoteGenerator::~RemoteGenerator() = default;

std::string RemoteGenerator::Generate(const GenerationRequest& request) {
  Json body = {{config_.prompt_field, request.prompt},
               {config_.temperature_field, config_.temperature},
               {config_.max_tokens_field, config_.max_tokens}};
  if (!config_.model_field.empty()) body[config_.model_field] = config_.model;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config_.auth_header.empty()) {
    headers.emplace(config_.auth_header, config_.auth_value);
  }

  SemaphoreGuard guard(in_flight_);
  std::string last_error;
  auto backoff = config_.initial_backoff;
  const int attempts = std::max(1, config_.attempts);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(origin_);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
        config_.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    auto result = client.Post(path_, headers, payload, "application/json");
    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status == 429 || result->status >= 500) {
      last_error = "HTTP " + std::to_string(result->status);
      continue;
    }
    if (result->status < 200 || result->status >= 300) {
      throw GeneratorError("request '" + request.key + "' failed with HTTP " +
                           std::to_string(result->status));
    }
    Json response;
    try {
      response = Json::parse(result->body);
    } catch (const Json::parse_error& e) {
      throw GeneratorError("response for '" + request.key + "' is not JSON: " + e.what());
    }
    const Json::json_pointer pointer(config_.response_pointer);
    if (!response.contains(pointer) || !response.at(pointer).is_string()) {
      throw GeneratorError("response for '" + request.key + "' has no text at " +
                           config_.response_pointer);
    }
    return response.at(pointer).get<std::string>();
  }
  throw GeneratorError("request '" + request.key + "' failed after " +
                       std::to_string(attempts) + " attempts: " + last_error);
}

}  // namespace flowsim
