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

#include "sbac/live_transport.h"

#include <httplib.h>

#include "sbac/crypto.h"
#include "sbac/errors.h"

namespace sbac {

LiveTransport::LiveTransport(LiveTransportConfig config)
    : config_(std::move(config)) {
  const std::string& url = config_.endpoint;
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    Fail(ErrorCode::kInvalidArgument, "endpoint needs a scheme: " + url);
  }
  std::size_t path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  std::string base =
      path_start == std::string::npos ? "" : url.substr(path_start);
  while (!base.empty() && base.back() == '/') base.pop_back();
  path_ = base + "/chat/completions";
}

Json LiveTransport::BuildBody(const ChatRequest& request,
                              ModelTier tier) const {
  Json content = Json::array();
  for (const ContentPart& part : request.user_turns) {
    if (const auto* text = std::get_if<TextPart>(&part)) {
      content.push_back(Json{{"type", "text"}, {"text", text->text}});
    } else {
      const auto& image = std::get<ImagePart>(part);
      content.push_back(Json{
          {"type", "image_url"},
          {"image_url",
           Json{{"url", "data:image/png;base64," + Base64Encode(image.png)}}}});
    }
  }
  Json messages = Json::array();
  messages.push_back(Json{{"role", "system"}, {"content", request.system_prompt}});
  if (!content.empty()) {
    messages.push_back(Json{{"role", "user"}, {"content", std::move(content)}});
  }
  Json body = Json{{"model", tier == ModelTier::kFast ? config_.fast_model
                                                      : config_.frontier_model},
                   {"messages", std::move(messages)}};
  if (config_.temperature) body["temperature"] = *config_.temperature;
  return body;
}

std::string ExtractCompletionText(const std::string& body) {
  Json parsed = Json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    Fail(ErrorCode::kTransportError, "completion body is not JSON");
  }
  const Json* content = nullptr;
  if (parsed.contains("choices") && parsed["choices"].is_array() &&
      !parsed["choices"].empty()) {
    const Json& choice = parsed["choices"][0];
    if (choice.contains("message") && choice["message"].contains("content")) {
      content = &choice["message"]["content"];
    }
  }
  if (content == nullptr || !content->is_string()) {
    Fail(ErrorCode::kTransportError, "completion has no message content");
  }
  return content->get<std::string>();
}

TransportReply LiveTransport::Send(const ChatRequest& request,
                                   const TransportContext& context) {
  httplib::Client client(origin_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  std::string body = BuildBody(request, context.tier).dump();
  httplib::Result result =
      client.Post(path_, headers, body, "application/json");
  if (!result) {
    httplib::Error err = result.error();
    std::string what = httplib::to_string(err);
    if (err == httplib::Error::ConnectionTimeout ||
        err == httplib::Error::Read) {
      Fail(ErrorCode::kTimeoutError, "model endpoint timed out: " + what);
    }
    Fail(ErrorCode::kTransportError, "model endpoint unreachable: " + what);
  }
  if (result->status == 401 || result->status == 403) {
    Fail(ErrorCode::kTransportError,
         "model endpoint rejected credentials (HTTP " +
             std::to_string(result->status) + ")");
  }
  if (result->status != 200) {
    Fail(ErrorCode::kTransportError,
         "model endpoint returned HTTP " + std::to_string(result->status));
  }
  return TransportReply{ExtractCompletionText(result->body), std::nullopt,
                        std::nullopt};
}

}  // namespace sbac
