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

#ifndef SBAC_TRANSPORTS_H_
#define SBAC_TRANSPORTS_H_

#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sbac/errors.h"
#include "sbac/llm_gateway.h"

namespace sbac {

// Programmed responses, served in order. Each step may pin the call kind it
// expects; a mismatch raises FixtureMismatch.
class ScriptedTransport : public Transport {
 public:
  using Handler = std::function<std::string(const ChatRequest&)>;

  ScriptedTransport() = default;

  ScriptedTransport& Enqueue(std::string reply,
                             std::optional<CallKind> expect = std::nullopt);
  ScriptedTransport& EnqueueError(ErrorCode code,
                                  std::optional<CallKind> expect = std::nullopt);
  // Computes the reply from the request; consumed like any other step.
  ScriptedTransport& EnqueueHandler(Handler handler,
                                    std::optional<CallKind> expect = std::nullopt);
  // Used once the queue is empty. Without one, an empty queue is a
  // TransportError.
  void SetFallbackHandler(Handler handler);

  TransportReply Send(const ChatRequest& request,
                      const TransportContext& context) override;

  std::vector<ChatRequest> received() const;
  std::vector<CallKind> received_kinds() const;
  std::size_t pending() const;

 private:
  struct Step {
    std::optional<CallKind> expect;
    std::optional<ErrorCode> error;
    Handler handler;
  };

  mutable std::mutex mu_;
  std::deque<Step> steps_;
  Handler fallback_;
  std::vector<ChatRequest> received_;
};

// One recorded call.
struct Fixture {
  CallKind kind = CallKind::kCiAnalysis;
  std::size_t index = 0;
  std::string request_digest;
  std::string response;
  std::optional<std::string> timestamp;
  std::optional<std::int64_t> latency_ms;

  bool operator==(const Fixture&) const = default;
};

Json ToJson(const Fixture& fixture);
Fixture FixtureFromJson(const Json& value, const std::string& path);
std::vector<Fixture> FixturesFromCallLog(const CallLog& log);

// Serves recorded responses by (kind, sequence index). Fixtures registered
// without a session id apply to every session.
class ReplayTransport : public Transport {
 public:
  explicit ReplayTransport(std::vector<Fixture> fixtures = {},
                           bool check_digest = false);

  void SetSessionFixtures(const std::string& session_id,
                          std::vector<Fixture> fixtures);

  TransportReply Send(const ChatRequest& request,
                      const TransportContext& context) override;

 private:
  const std::vector<Fixture>* FixturesFor(const std::string& session_id) const;

  mutable std::mutex mu_;
  std::vector<Fixture> shared_;
  std::map<std::string, std::vector<Fixture>> by_session_;
  bool check_digest_;
};

// Forwards to `inner` and writes one fixture file per successful call under
// <dir>/<session>/<index>_<kind>.json.
class RecordingTransport : public Transport {
 public:
  RecordingTransport(std::shared_ptr<Transport> inner,
                     std::filesystem::path dir);

  TransportReply Send(const ChatRequest& request,
                      const TransportContext& context) override;

 private:
  std::shared_ptr<Transport> inner_;
  std::filesystem::path dir_;
  std::mutex mu_;
};

// Writes <dir>/<session>/<index>_<kind>.json and returns its path.
std::filesystem::path WriteFixture(const std::filesystem::path& dir,
                                   const std::string& session_id,
                                   const Fixture& fixture);

// Reads every *.json fixture in `dir`, ordered by index.
std::vector<Fixture> LoadFixtureDir(const std::filesystem::path& dir);

}  // namespace sbac

#endif  // SBAC_TRANSPORTS_H_
