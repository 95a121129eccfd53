/*
 * Copyright 2026 The stargraph Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stargraph {

enum class ErrorCode {
  kMalformedLine,
  kVariableInData,
  kLiteralSubject,
  kVariablePredicate,
  kEmptyGraph,
  kEmptyQuery,
  kRejectedEmptySegment,
  kMissingManifest,
  kMissingBorderSidecar,
  kChecksumMismatch,
  kIOError,
  kTooManySegments,
  kNotAPartition,
  kUnknownNode,
  kMissingNode,
  kNotANodeCover,
  kSearchSpaceTooLarge,
  kIncompatibleEmbeddings,
  kNotAStarDecomposition,
  kNotAnSDecomposition,
  kNotSoDecomposition,
  kCartesianLimit,
  kMapFnError,
  kReduceFnError,
  kInvalidArgument,
};

inline std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kVariableInData: return "VariableInData";
    case ErrorCode::kLiteralSubject: return "LiteralSubject";
    case ErrorCode::kVariablePredicate: return "VariablePredicate";
    case ErrorCode::kEmptyGraph: return "EmptyGraph";
    case ErrorCode::kEmptyQuery: return "EmptyQuery";
    case ErrorCode::kRejectedEmptySegment: return "RejectedEmptySegment";
    case ErrorCode::kMissingManifest: return "MissingManifest";
    case ErrorCode::kMissingBorderSidecar: return "MissingBorderSidecar";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kIOError: return "IOError";
    case ErrorCode::kTooManySegments: return "TooManySegments";
    case ErrorCode::kNotAPartition: return "NotAPartition";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kMissingNode: return "MissingNode";
    case ErrorCode::kNotANodeCover: return "NotANodeCover";
    case ErrorCode::kSearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::kIncompatibleEmbeddings: return "IncompatibleEmbeddings";
    case ErrorCode::kNotAStarDecomposition: return "NotAStarDecomposition";
    case ErrorCode::kNotAnSDecomposition: return "NotAnSDecomposition";
    case ErrorCode::kNotSoDecomposition: return "NotSoDecomposition";
    case ErrorCode::kCartesianLimit: return "CartesianLimit";
    case ErrorCode::kMapFnError: return "MapFnError";
    case ErrorCode::kReduceFnError: return "ReduceFnError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the runtime when a user map or reduce function throws. Keeps the
// key of the failing task and the code of the underlying error, if any.
class TaskError : public Error {
 public:
  TaskError(ErrorCode code, std::size_t stage, std::string key,
            ErrorCode cause, const std::string& what)
      : Error(code, "stage " + std::to_string(stage) + ", key [" + key +
                        "]: " + what),
        stage_(stage),
        key_(std::move(key)),
        cause_(cause) {}

  std::size_t stage() const noexcept { return stage_; }
  const std::string& key() const noexcept { return key_; }
  ErrorCode cause() const noexcept { return cause_; }

 private:
  std::size_t stage_;
  std::string key_;
  ErrorCode cause_;
};

// The code that decides how a failure is reported: for task failures this is
// the code of the error raised inside the task.
inline ErrorCode root_code(const Error& e) {
  if (auto* t = dynamic_cast<const TaskError*>(&e)) return t->cause();
  return e.code();
}

}  // namespace stargraph
