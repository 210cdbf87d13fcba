/*
 * Copyright 2026 The astrid-cpp Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
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

namespace astrid {

/// Failure classes reported by the library. The CLI maps these onto exit
/// codes, so adding a value here means revisiting `cli.hpp`.
enum class ErrorCode {
  kSyntaxError,
  kUnsupportedAttributeType,
  kUnknownClassColumn,
  kUnknownAttribute,
  kClassAttributeNotNominal,
  kEmptyResult,
  kClassTooSmall,
  kInvalidDataset,
  kParseError,
  kNotAPartition,
  kGroupingMismatch,
  kAlreadySingleton,
  kTooLarge,
  kSingleClassTraining,
  kUnsupportedKind,
  kInvalidArgument,
  kMetadataMismatch,
  kEmptyTestSet,
  kTrialFailed,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnsupportedAttributeType: return "UnsupportedAttributeType";
    case ErrorCode::kUnknownClassColumn: return "UnknownClassColumn";
    case ErrorCode::kUnknownAttribute: return "UnknownAttribute";
    case ErrorCode::kClassAttributeNotNominal: return "ClassAttributeNotNominal";
    case ErrorCode::kEmptyResult: return "EmptyResult";
    case ErrorCode::kClassTooSmall: return "ClassTooSmall";
    case ErrorCode::kInvalidDataset: return "InvalidDataset";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kNotAPartition: return "NotAPartition";
    case ErrorCode::kGroupingMismatch: return "GroupingMismatch";
    case ErrorCode::kAlreadySingleton: return "AlreadySingleton";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kSingleClassTraining: return "SingleClassTraining";
    case ErrorCode::kUnsupportedKind: return "UnsupportedKind";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMetadataMismatch: return "MetadataMismatch";
    case ErrorCode::kEmptyTestSet: return "EmptyTestSet";
    case ErrorCode::kTrialFailed: return "TrialFailed";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Error carrying a 1-based source line, used by the ARFF and CSV readers.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, const std::string& expected)
      : Error(ErrorCode::kSyntaxError, "line " + std::to_string(line) + ": " + expected),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace astrid
