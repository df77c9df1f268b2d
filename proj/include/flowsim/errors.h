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

#ifndef FLOWSIM_ERRORS_H_
#define FLOWSIM_ERRORS_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace flowsim {

// Base of every error thrown by the library. The CLI maps GeneratorError to
// exit code 3 and every other Error to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  using Error::Error;
};

// A structurally invalid document. `path()` locates the fault, e.g.
// "steps[1].inputs[0]".
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)),
        message_(message) {}

  const std::string& path() const { return path_; }
  // The message without the path prefix.
  const std::string& message() const { return message_; }

 private:
  std::string path_;
  std::string message_;
};

// Input too large for the requested computation.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class IdMismatch : public Error {
 public:
  using Error::Error;
};

class DuplicateName : public Error {
 public:
  using Error::Error;
};

class EmptyCatalog : public Error {
 public:
  using Error::Error;
};

class MissingStep : public Error {
 public:
  using Error::Error;
};

class UnboundPlaceholder : public Error {
 public:
  using Error::Error;
};

class GeneratorError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DuplicateId : public Error {
 public:
  using Error::Error;
};

class MissingGenerated : public Error {
 public:
  using Error::Error;
};

class SampleSetMismatch : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class ConstantInput : public Error {
 public:
  using Error::Error;
};

}  // namespace flowsim

#endif  // FLOWSIM_ERRORS_H_
