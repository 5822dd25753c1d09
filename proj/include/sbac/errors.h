// Copyright 2026 The SBAC Authors.
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

#ifndef SBAC_ERRORS_H_
#define SBAC_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sbac {

enum class ErrorCode {
  kInvalidArgument,
  kNotFound,
  kMalformedRationale,
  kEmptySegment,
  kDuplicateShapeId,
  kInvalidIdentification,
  kUnknownMarkReference,
  kMissingPlaceholder,
  kTransportError,
  kTimeoutError,
  kSchemaError,
  kFixtureMismatch,
  kStageError,
  kAnalysisUnavailable,
  kDuplicateTypePrefixMismatch,
  kUnknownInsight,
  kClarifyUnavailable,
  kNoOpEdit,
  kRealizationInvalid,
  kTestUnavailable,
  kStorageError,
  kIllegalTransition,
  kIdentificationInvalid,
  kBusy,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library is an Error carrying a stable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// A model response that does not satisfy its schema. `path` locates the
// first violation, e.g. "$.insights[2].type".
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message);

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

inline bool IsTransportFailure(ErrorCode code) {
  return code == ErrorCode::kTransportError || code == ErrorCode::kTimeoutError;
}

}  // namespace sbac

#endif  // SBAC_ERRORS_H_
