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

#include "sbac/transports.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sbac {
namespace {

void CheckExpected(const std::optional<CallKind>& expect, CallKind actual,
                   std::size_t index) {
  if (expect && *expect != actual) {
    Fail(ErrorCode::kFixtureMismatch,
         "call " + std::to_string(index) + " is " +
             std::string(ToString(actual)) + ", expected " +
             std::string(ToString(*expect)));
  }
}

}  // namespace

ScriptedTransport& ScriptedTransport::Enqueue(std::string reply,
                                              std::optional<CallKind> expect) {
  return EnqueueHandler(
      [text = std::move(reply)](const ChatRequest&) { return text; }, expect);
}

ScriptedTransport& ScriptedTransport::EnqueueError(
    ErrorCode code, std::optional<CallKind> expect) {
  std::lock_guard<std::mutex> lock(mu_);
  steps_.push_back(Step{expect, code, nullptr});
  return *this;
}

ScriptedTransport& ScriptedTransport::EnqueueHandler(
    Handler handler, std::optional<CallKind> expect) {
  std::lock_guard<std::mutex> lock(mu_);
  steps_.push_back(Step{expect, std::nullopt, std::move(handler)});
  return *this;
}

void ScriptedTransport::SetFallbackHandler(Handler handler) {
  std::lock_guard<std::mutex> lock(mu_);
  fallback_ = std::move(handler);
}

TransportReply ScriptedTransport::Send(const ChatRequest& request,
                                       const TransportContext& context) {
  Step step;
  {
    std::lock_guard<std::mutex> lock(mu_);
    received_.push_back(request);
    if (steps_.empty()) {
      if (!fallback_) {
        Fail(ErrorCode::kTransportError,
             "script exhausted at " + std::string(ToString(request.kind)));
      }
      step.handler = fallback_;
    } else {
      step = std::move(steps_.front());
      steps_.pop_front();
    }
  }
  CheckExpected(step.expect, request.kind, context.sequence_index);
  if (step.error) Fail(*step.error, "scripted failure");
  return TransportReply{step.handler(request), std::nullopt, std::nullopt};
}

std::vector<ChatRequest> ScriptedTransport::received() const {
  std::lock_guard<std::mutex> lock(mu_);
  return received_;
}

std::vector<CallKind> ScriptedTransport::received_kinds() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<CallKind> kinds;
  for (const ChatRequest& r : received_) kinds.push_back(r.kind);
  return kinds;
}

std::size_t ScriptedTransport::pending() const {
  std::lock_guard<std::mutex> lock(mu_);
  return steps_.size();
}

Json ToJson(const Fixture& fixture) {
  Json out = Json{{"kind", ToString(fixture.kind)},
                  {"index", fixture.index},
                  {"requestDigest", fixture.request_digest},
                  {"response", fixture.response}};
  if (fixture.timestamp) out["timestamp"] = *fixture.timestamp;
  if (fixture.latency_ms) out["latencyMs"] = *fixture.latency_ms;
  return out;
}

Fixture FixtureFromJson(const Json& value, const std::string& path) {
  ObjectReader r(value, path);
  Fixture f;
  std::string kind = r.RequiredString("kind");
  auto k = CallKindFromString(kind);
  if (!k) throw SchemaError(r.PathOf("kind"), "unknown call kind " + kind);
  f.kind = *k;
  std::int64_t index = r.RequiredInt("index");
  if (index < 0) throw SchemaError(r.PathOf("index"), "must be >= 0");
  f.index = static_cast<std::size_t>(index);
  f.request_digest = r.RequiredString("requestDigest");
  f.response = r.RequiredString("response");
  f.timestamp = r.OptionalString("timestamp");
  if (r.Has("latencyMs")) f.latency_ms = r.RequiredInt("latencyMs");
  r.Finish(UnknownFields::kReject);
  return f;
}

std::vector<Fixture> FixturesFromCallLog(const CallLog& log) {
  std::vector<Fixture> out;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const CallRecord& rec = log[i];
    out.push_back(Fixture{rec.kind, i, rec.request_digest, rec.response,
                          rec.timestamp, rec.latency_ms});
  }
  return out;
}

ReplayTransport::ReplayTransport(std::vector<Fixture> fixtures,
                                 bool check_digest)
    : shared_(std::move(fixtures)), check_digest_(check_digest) {}

void ReplayTransport::SetSessionFixtures(const std::string& session_id,
                                         std::vector<Fixture> fixtures) {
  std::lock_guard<std::mutex> lock(mu_);
  by_session_[session_id] = std::move(fixtures);
}

const std::vector<Fixture>* ReplayTransport::FixturesFor(
    const std::string& session_id) const {
  auto it = by_session_.find(session_id);
  return it == by_session_.end() ? &shared_ : &it->second;
}

TransportReply ReplayTransport::Send(const ChatRequest& request,
                                     const TransportContext& context) {
  std::lock_guard<std::mutex> lock(mu_);
  const std::vector<Fixture>* fixtures = FixturesFor(context.session_id);
  auto it = std::find_if(
      fixtures->begin(), fixtures->end(),
      [&](const Fixture& f) { return f.index == context.sequence_index; });
  if (it == fixtures->end()) {
    Fail(ErrorCode::kTransportError,
         "no fixture for call " + std::to_string(context.sequence_index) +
             " (" + std::string(ToString(request.kind)) + ")");
  }
  CheckExpected(it->kind, request.kind, context.sequence_index);
  if (check_digest_ && it->request_digest != context.request_digest) {
    Fail(ErrorCode::kFixtureMismatch,
         "request digest differs at call " +
             std::to_string(context.sequence_index));
  }
  return TransportReply{it->response, it->timestamp, it->latency_ms};
}

RecordingTransport::RecordingTransport(std::shared_ptr<Transport> inner,
                                       std::filesystem::path dir)
    : inner_(std::move(inner)), dir_(std::move(dir)) {}

TransportReply RecordingTransport::Send(const ChatRequest& request,
                                        const TransportContext& context) {
  auto wall = std::chrono::system_clock::now();
  auto start = std::chrono::steady_clock::now();
  TransportReply reply = inner_->Send(request, context);
  if (!reply.timestamp) reply.timestamp = FormatTimestamp(wall);
  if (!reply.latency_ms) {
    reply.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  }
  Fixture fixture{request.kind,     context.sequence_index,
                  context.request_digest, reply.text,
                  reply.timestamp,  reply.latency_ms};

  std::lock_guard<std::mutex> lock(mu_);
  WriteFixture(dir_, context.session_id, fixture);
  return reply;
}

std::filesystem::path WriteFixture(const std::filesystem::path& dir,
                                   const std::string& session_id,
                                   const Fixture& fixture) {
  std::filesystem::path session_dir =
      dir / (session_id.empty() ? "default" : session_id);
  std::error_code ec;
  std::filesystem::create_directories(session_dir, ec);
  std::ostringstream name;
  name << std::setw(4) << std::setfill('0') << fixture.index << '_'
       << ToString(fixture.kind) << ".json";
  std::filesystem::path path = session_dir / name.str();
  std::ofstream out(path);
  out << ToJson(fixture).dump(2) << '\n';
  if (!out) Fail(ErrorCode::kStorageError, "cannot write fixture " + path.string());
  return path;
}

std::vector<Fixture> LoadFixtureDir(const std::filesystem::path& dir) {
  std::vector<Fixture> fixtures;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    Fail(ErrorCode::kNotFound, "fixture directory " + dir.string());
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    std::stringstream text;
    text << in.rdbuf();
    fixtures.push_back(
        FixtureFromJson(ParseJsonText(text.str()), entry.path().string()));
  }
  std::sort(fixtures.begin(), fixtures.end(),
            [](const Fixture& a, const Fixture& b) { return a.index < b.index; });
  return fixtures;
}

}  // namespace sbac
