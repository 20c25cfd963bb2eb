// Copyright 2026 The QGC Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace qgc {

// Failure categories. Each maps onto one CLI exit code.
enum class ErrorKind {
  kValidation,       // bad input data, bad configuration, unreadable files
  kBackend,          // generation or scoring service failures
  kEvaluation,       // scoring protocol violations
  kMalformedOutput,  // model output that does not follow the output schema
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by parse_generated. Carries the offending text verbatim.
class MalformedOutputError : public Error {
 public:
  MalformedOutputError(const std::string& message, std::string raw)
      : Error(ErrorKind::kMalformedOutput, message), raw_(std::move(raw)) {}

  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation:
      return 2;
    case ErrorKind::kBackend:
      return 3;
    case ErrorKind::kEvaluation:
    case ErrorKind::kMalformedOutput:
      return 4;
  }
  return 1;
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace qgc
