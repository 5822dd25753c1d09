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

#include "sbac/llm_gateway.h"

#include <ctime>
#include <iomanip>
#include <sstream>

#include <spdlog/spdlog.h>

#include "sbac/crypto.h"
#include "sbac/errors.h"

namespace sbac {

std::string_view ToString(CallKind kind) {
  switch (kind) {
    case CallKind::kMarkIdentification: return "mark_identification";
    case CallKind::kCiAnalysis: return "ci_analysis";
    case CallKind::kIntentClassification: return "intent_classification";
    case CallKind::kDeepResolution: return "deep_resolution";
    case CallKind::kSketchSync: return "sketch_sync";
    case CallKind::kPolicyPropagation: return "policy_propagation";
    case CallKind::kInsightPropagation: return "insight_propagation";
    case CallKind::kReidentification: return "reidentification";
    case CallKind::kFactorDecomposition: return "factor_decomposition";
    case CallKind::kStoryRealization: return "story_realization";
  }
  return "";
}

std::optional<CallKind> CallKindFromString(std::string_view s) {
  for (CallKind k : kAllCallKinds) {
    if (ToString(k) == s) return k;
  }
  return std::nullopt;
}

std::string_view ToString(ModelTier tier) {
  return tier == ModelTier::kFast ? "fast" : "frontier";
}

std::optional<ModelTier> ModelTierFromString(std::string_view s) {
  if (s == "fast") return ModelTier::kFast;
  if (s == "frontier") return ModelTier::kFrontier;
  return std::nullopt;
}

ModelTier TierFor(CallKind kind) {
  switch (kind) {
    case CallKind::kIntentClassification:
    case CallKind::kPolicyPropagation:
    case CallKind::kInsightPropagation:
      return ModelTier::kFast;
    default:
      return ModelTier::kFrontier;
  }
}

std::string_view ToString(ImagePurpose purpose) {
  switch (purpose) {
    case ImagePurpose::kUnannotated: return "unannotated";
    case ImagePurpose::kNumbered: return "numbered";
    case ImagePurpose::kSom: return "som";
  }
  return "";
}

void CheckImageParts(const ChatRequest& request) {
  for (const ContentPart& part : request.user_turns) {
    const auto* image = std::get_if<ImagePart>(&part);
    if (image == nullptr) continue;
    bool allowed = false;
    switch (request.kind) {
      case CallKind::kMarkIdentification:
      case CallKind::kReidentification:
        allowed = image->purpose == ImagePurpose::kUnannotated ||
                  image->purpose == ImagePurpose::kNumbered;
        break;
      case CallKind::kCiAnalysis:
        allowed = image->purpose == ImagePurpose::kSom;
        break;
      case CallKind::kSketchSync:
        allowed = image->purpose == ImagePurpose::kUnannotated;
        break;
      default:
        break;
    }
    if (!allowed) {
      Fail(ErrorCode::kInvalidArgument,
           std::string(ToString(image->purpose)) + " image not accepted by " +
               std::string(ToString(request.kind)));
    }
  }
}

std::string RequestDigest(const ChatRequest& request) {
  Json turns = Json::array();
  for (const ContentPart& part : request.user_turns) {
    if (const auto* text = std::get_if<TextPart>(&part)) {
      turns.push_back(Json{{"text", text->text}});
    } else {
      const auto& image = std::get<ImagePart>(part);
      turns.push_back(Json{{"image", Sha256Hex(image.png)},
                           {"purpose", ToString(image.purpose)}});
    }
  }
  Json canonical = Json{{"kind", ToString(request.kind)},
                        {"system", request.system_prompt},
                        {"turns", std::move(turns)},
                        {"schema", request.schema_id}};
  return Sha256Hex(canonical.dump());
}

Json ToJson(const CallRecord& record) {
  return Json{{"kind", ToString(record.kind)},
              {"tier", ToString(record.tier)},
              {"schema", record.schema_id},
              {"requestDigest", record.request_digest},
              {"response", record.response},
              {"timestamp", record.timestamp},
              {"latencyMs", record.latency_ms}};
}

CallRecord CallRecordFromJson(const Json& value, const std::string& path) {
  ObjectReader r(value, path);
  CallRecord rec;
  std::string kind = r.RequiredString("kind");
  auto k = CallKindFromString(kind);
  if (!k) throw SchemaError(r.PathOf("kind"), "unknown call kind " + kind);
  rec.kind = *k;
  std::string tier = r.RequiredString("tier");
  auto t = ModelTierFromString(tier);
  if (!t) throw SchemaError(r.PathOf("tier"), "unknown tier " + tier);
  rec.tier = *t;
  rec.schema_id = r.RequiredString("schema");
  rec.request_digest = r.RequiredString("requestDigest");
  rec.response = r.RequiredString("response");
  rec.timestamp = r.RequiredString("timestamp");
  rec.latency_ms = r.RequiredInt("latencyMs");
  r.Finish(UnknownFields::kReject);
  return rec;
}

Json CallLogToJson(const CallLog& log) {
  Json out = Json::array();
  for (const CallRecord& rec : log) out.push_back(ToJson(rec));
  return out;
}

CallLog CallLogFromJson(const Json& value, const std::string& path) {
  if (!value.is_array()) throw SchemaError(path, "expected an array");
  CallLog log;
  for (std::size_t i = 0; i < value.size(); ++i) {
    log.push_back(CallRecordFromJson(value[i], IndexPath(path, i)));
  }
  return log;
}

std::string FormatTimestamp(std::chrono::system_clock::time_point t) {
  using namespace std::chrono;
  auto ms = duration_cast<milliseconds>(t.time_since_epoch()).count() % 1000;
  if (ms < 0) ms += 1000;
  std::time_t secs = system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3)
      << std::setfill('0') << ms << 'Z';
  return out.str();
}

Gateway::Gateway(std::shared_ptr<Transport> transport, GatewayOptions options)
    : transport_(std::move(transport)), options_(std::move(options)) {
  if (!transport_) Fail(ErrorCode::kInvalidArgument, "gateway needs a transport");
}

std::string Gateway::Invoke(const ChatRequest& request,
                            std::string_view session_id, CallLog& log) const {
  CheckImageParts(request);
  TransportContext context;
  context.session_id = std::string(session_id);
  context.sequence_index = log.size();
  context.tier = TierFor(request.kind);
  context.request_digest = RequestDigest(request);

  for (int attempt = 0;; ++attempt) {
    auto wall = options_.clock();
    auto start = std::chrono::steady_clock::now();
    try {
      TransportReply reply = transport_->Send(request, context);
      auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
      CallRecord rec;
      rec.kind = request.kind;
      rec.tier = context.tier;
      rec.schema_id = request.schema_id;
      rec.request_digest = context.request_digest;
      rec.response = reply.text;
      rec.timestamp = reply.timestamp.value_or(FormatTimestamp(wall));
      rec.latency_ms = reply.latency_ms.value_or(elapsed);
      log.push_back(std::move(rec));
      return std::move(reply.text);
    } catch (const Error& e) {
      if (!IsTransportFailure(e.code()) || attempt >= options_.retry_budget) {
        throw;
      }
      spdlog::warn("{} call for session {} failed ({}), retrying",
                   ToString(request.kind), session_id, e.what());
    }
  }
}

}  // namespace sbac
