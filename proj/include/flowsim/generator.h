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

// Text generators behind the two-stage pipeline.

#ifndef FLOWSIM_GENERATOR_H_
#define FLOWSIM_GENERATOR_H_

#include <chrono>
#include <map>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>

#include "flowsim/workflow.h"

namespace flowsim {

enum class TaskKind { kCreateFlow, kPopulateInputs };

std::string_view ToString(TaskKind kind);

struct GenerationRequest {
  // Stable identity of the call: "<sample>/createFlow" or
  // "<sample>/populateInputs/<step id>".
  std::string key;
  TaskKind task = TaskKind::kCreateFlow;
  std::string prompt;
};

class Generator {
 public:
  virtual ~Generator() = default;

  // Returns the raw model text. Throws GeneratorError when no response could
  // be obtained.
  virtual std::string Generate(const GenerationRequest& request) = 0;
};

// Replays canned responses by request key. Thread-safe after construction.
class MockGenerator : public Generator {
 public:
  explicit MockGenerator(std::map<std::string, std::string> responses)
      : responses_(std::move(responses)) {}

  // JSONL of {"key": ..., "response": ...}; a non-string response is stored
  // as its compact JSON text.
  static MockGenerator Load(const std::string& path);
  static MockGenerator FromJsonLines(std::string_view text);

  std::string Generate(const GenerationRequest& request) override;

  std::size_t size() const { return responses_.size(); }

 private:
  std::map<std::string, std::string> responses_;
};

struct RemoteGeneratorConfig {
  // Full endpoint, e.g. "http://localhost:8000/v1/completions".
  std::string url;
  std::string model;
  double temperature = 0.0;
  int max_tokens = 2048;
  std::chrono::milliseconds timeout{60'000};
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  int max_in_flight = 4;

  // Sent verbatim when auth_header is non-empty, e.g. "Authorization" /
  // "Bearer ...".
  std::string auth_header;
  std::string auth_value;

  // Request body field names.
  std::string model_field = "model";
  std::string prompt_field = "prompt";
  std::string temperature_field = "temperature";
  std::string max_tokens_field = "max_tokens";
  // JSON pointer to the generated text in the response body.
  std::string response_pointer = "/text";

  static RemoteGeneratorConfig FromJson(const Json& node);
};

// POSTs {model, prompt, temperature, max_tokens} as JSON and reads the text at
// response_pointer. Transport errors, 429 and 5xx are retried with
// exponential backoff; other 4xx fail immediately.
class RemoteGenerator : public Generator {
 public:
  explicit RemoteGenerator(RemoteGeneratorConfig config);
  ~RemoteGenerator() override;

  std::string Generate(const GenerationRequest& request) override;

  const RemoteGeneratorConfig& config() const { return config_; }

 private:
  RemoteGeneratorConfig config_;
  std::string origin_;
  std::string path_;
  std::counting_semaphore<1024> in_flight_;
};

}  // namespace flowsim

#endif  // FLOWSIM_GENERATOR_H_
