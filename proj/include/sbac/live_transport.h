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

#ifndef SBAC_LIVE_TRANSPORT_H_
#define SBAC_LIVE_TRANSPORT_H_

#include <chrono>
#include <optional>
#include <string>

#include "sbac/llm_gateway.h"

namespace sbac {

struct LiveTransportConfig {
  // Base URL; "/chat/completions" is appended, e.g. https://api.x.com/v1
  std::string endpoint;
  std::string api_key;
  std::string frontier_model;
  std::string fast_model;
  std::optional<double> temperature;  // provider default when unset
  std::chrono::seconds timeout{120};
};

// OpenAI-compatible chat-completions client.
class LiveTransport : public Transport {
 public:
  explicit LiveTransport(LiveTransportConfig config);

  TransportReply Send(const ChatRequest& request,
                      const TransportContext& context) override;

  // Request body for the given call, exposed for tests.
  Json BuildBody(const ChatRequest& request, ModelTier tier) const;

 private:
  LiveTransportConfig config_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;    // base path + /chat/completions
};

// Extracts choices[0].message.content. Throws Error(kTransportError).
std::string ExtractCompletionText(const std::string& body);

}  // namespace sbac

#endif  // SBAC_LIVE_TRANSPORT_H_
