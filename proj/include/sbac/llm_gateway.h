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

#ifndef SBAC_LLM_GATEWAY_H_
#define SBAC_LLM_GATEWAY_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sbac/json_util.h"

namespace sbac {

enum class CallKind {
  kMarkIdentification,
  kCiAnalysis,
  kIntentClassification,
  kDeepResolution,
  kSketchSync,
  kPolicyPropagation,
  kInsightPropagation,
  kReidentification,
  kFactorDecomposition,
  kStoryRealization,
};

inline constexpr CallKind kAllCallKinds[] = {
    CallKind::kMarkIdentification,  CallKind::kCiAnalysis,
    CallKind::kIntentClassification, CallKind::kDeepResolution,
    CallKind::kSketchSync,          CallKind::kPolicyPropagation,
    CallKind::kInsightPropagation,  CallKind::kReidentification,
    CallKind::kFactorDecomposition, CallKind::kStoryRealization};

enum class ModelTier { kFrontier, kFast };

std::string_view ToString(CallKind kind);
std::optional<CallKind> CallKindFromString(std::string_view s);
std::string_view ToString(ModelTier tier);
std::optional<ModelTier> ModelTierFromString(std::string_view s);

ModelTier TierFor(CallKind kind);

enum class ImagePurpose { kUnannotated, kNumbered, kSom };

std::string_view ToString(ImagePurpose purpose);

struct TextPart {
  std::string text;
};

struct ImagePart {
  std::string png;  // raw bytes
  ImagePurpose purpose = ImagePurpose::kUnannotated;
};

using ContentPart = std::variant<TextPart, ImagePart>;

struct ChatRequest {
  CallKind kind = CallKind::kCiAnalysis;
  std::string system_prompt;
  std::vector<ContentPart> user_turns;
  std::string schema_id;
};

// Throws Error(kInvalidArgument) when an image part is attached to a kind
// that does not take that image.
void CheckImageParts(const ChatRequest& request);

// Stable digest over kind, prompt, turns (images by content hash) and schema.
std::string RequestDigest(const ChatRequest& request);

struct CallRecord {
  CallKind kind = CallKind::kCiAnalysis;
  ModelTier tier = ModelTier::kFrontier;
  std::string schema_id;
  std::string request_digest;
  std::string response;
  std::string timestamp;  // ISO-8601 UTC, millisecond precision
  std::int64_t latency_ms = 0;

  bool operator==(const CallRecord&) const = default;
};

using CallLog = std::vector<CallRecord>;

Json ToJson(const CallRecord& record);
CallRecord CallRecordFromJson(const Json& value, const std::string& path);
Json CallLogToJson(const CallLog& log);
CallLog CallLogFromJson(const Json& value, const std::string& path);

struct TransportContext {
  std::string session_id;
  std::size_t sequence_index = 0;  // position of this call in the session log
  ModelTier tier = ModelTier::kFrontier;
  std::string request_digest;
};

struct TransportReply {
  std::string text;
  // Replay transports hand back the recorded values so that a replayed
  // session is identical to the original.
  std::optional<std::string> timestamp;
  std::optional<std::int64_t> latency_ms;
};

// Failures are reported by throwing Error(kTransportError | kTimeoutError)
// or Error(kFixtureMismatch).
class Transport {
 public:
  virtual ~Transport() = default;
  virtual TransportReply Send(const ChatRequest& request,
                              const TransportContext& context) = 0;
};

std::string FormatTimestamp(std::chrono::system_clock::time_point t);

struct GatewayOptions {
  int retry_budget = 1;
  std::function<std::chrono::system_clock::time_point()> clock =
      [] { return std::chrono::system_clock::now(); };
};

// Single entry point for model calls. Shareable across sessions; callers
// serialize calls within one session.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Transport> transport,
                   GatewayOptions options = {});

  // Returns the raw reply text and appends one CallRecord on success.
  // Transport failures are retried up to the budget, then rethrown.
  std::string Invoke(const ChatRequest& request, std::string_view session_id,
                     CallLog& log) const;

  Transport& transport() const { return *transport_; }

 private:
  std::shared_ptr<Transport> transport_;
  GatewayOptions options_;
};

}  // namespace sbac

#endif  // SBAC_LLM_GATEWAY_H_
