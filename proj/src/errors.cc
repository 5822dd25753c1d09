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

#include "sbac/errors.h"

#include <utility>

namespace sbac {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kMalformedRationale: return "MalformedRationale";
    case ErrorCode::kEmptySegment: return "EmptySegment";
    case ErrorCode::kDuplicateShapeId: return "DuplicateShapeId";
    case ErrorCode::kInvalidIdentification: return "InvalidIdentification";
    case ErrorCode::kUnknownMarkReference: return "UnknownMarkReference";
    case ErrorCode::kMissingPlaceholder: return "MissingPlaceholder";
    case ErrorCode::kTransportError: return "TransportError";
    case ErrorCode::kTimeoutError: return "TimeoutError";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kFixtureMismatch: return "FixtureMismatch";
    case ErrorCode::kStageError: return "StageError";
    case ErrorCode::kAnalysisUnavailable: return "AnalysisUnavailable";
    case ErrorCode::kDuplicateTypePrefixMismatch: return "DuplicateTypePrefixMismatch";
    case ErrorCode::kUnknownInsight: return "UnknownInsight";
    case ErrorCode::kClarifyUnavailable: return "ClarifyUnavailable";
    case ErrorCode::kNoOpEdit: return "NoOpEdit";
    case ErrorCode::kRealizationInvalid: return "RealizationInvalid";
    case ErrorCode::kTestUnavailable: return "TestUnavailable";
    case ErrorCode::kStorageError: return "StorageError";
    case ErrorCode::kIllegalTransition: return "IllegalTransition";
    case ErrorCode::kIdentificationInvalid: return "IdentificationInvalid";
    case ErrorCode::kBusy: return "Busy";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

SchemaError::SchemaError(std::string path, const std::string& message)
    : Error(ErrorCode::kSchemaError, path + ": " + message),
      path_(std::move(path)) {}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace sbac
