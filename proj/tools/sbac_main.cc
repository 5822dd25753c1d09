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

// sbac: serve the session API, replay archives, run the deterministic
// oracles standalone, and manage recorded model fixtures.

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "sbac/config.h"
#include "sbac/errors.h"
#include "sbac/http_api.h"
#include "sbac/live_transport.h"
#include "sbac/responses.h"
#include "sbac/ripple_engine.h"
#include "sbac/session_service.h"
#include "sbac/session_store.h"
#include "sbac/transports.h"
#include "sbac/vignette_engine.h"

namespace {

using sbac::Json;

httplib::Server* g_server = nullptr;

void Stop(int) {
  if (g_server) g_server->stop();
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) sbac::Fail(sbac::ErrorCode::kNotFound, "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return sbac::ParseJsonText(text.str());
}

void Print(const Json& value) { std::cout << value.dump(2) << "\n"; }

int Serve(const std::string& host, int port, const std::string& replay_dir,
          const std::string& record_dir) {
  sbac::ServiceConfig config = sbac::LoadConfig();
  std::shared_ptr<sbac::Transport> transport;
  if (!replay_dir.empty()) {
    transport = std::make_shared<sbac::ReplayTransport>(
        sbac::LoadFixtureDir(replay_dir));
    spdlog::info("serving recorded replies from {}", replay_dir);
  } else {
    std::vector<std::string> missing = sbac::MissingLiveSettings(config);
    if (!missing.empty()) {
      std::string list;
      for (const std::string& m : missing) list += " " + m;
      spdlog::error("model connection not configured, set:{}", list);
      return 2;
    }
    transport = std::make_shared<sbac::LiveTransport>(config.llm);
  }
  if (!record_dir.empty()) {
    transport = std::make_shared<sbac::RecordingTransport>(transport, record_dir);
  }
  sbac::Gateway gateway(transport);
  sbac::FileSessionStore store(config.store_dir);
  sbac::ServiceOptions options;
  options.vignette_k = config.vignette_k;
  sbac::SessionService service(store, gateway, options);

  httplib::Server server;
  sbac::RegisterRoutes(server, service);
  g_server = &server;
  std::signal(SIGINT, Stop);
  std::signal(SIGTERM, Stop);
  spdlog::info("listening on {}:{} (sessions in {})", host, port,
               config.store_dir.string());
  if (!server.listen(host, port)) {
    spdlog::error("cannot listen on {}:{}", host, port);
    return 1;
  }
  return 0;
}

int Replay(const std::string& archive_path, const std::string& out_path) {
  Json archive = ReadJsonFile(archive_path);
  sbac::SessionState state = sbac::ReplayArchive(archive);
  std::string replayed = sbac::ToJson(state).dump();
  std::string recorded = archive.at("state").dump();
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << sbac::ToJson(state).dump(2) << "\n";
  }
  if (replayed != recorded) {
    std::cout << "replay differs from the archived state\n";
    return 1;
  }
  std::cout << "replay identical (" << state.call_log.size() << " calls, "
            << state.journal.size() << " operations)\n";
  return 0;
}

int OracleRipple(const std::string& input_path) {
  Json input = ReadJsonFile(input_path);
  std::vector<sbac::Policy> policies = sbac::PoliciesFromJson(
      input.at("policies"), "policies", sbac::UnknownFields::kPreserve);
  const Json& e = input.at("edit");
  auto field = sbac::PolicyFieldFromString(e.at("field").get<std::string>());
  if (!field) sbac::Fail(sbac::ErrorCode::kInvalidArgument, "unknown field");
  sbac::PolicyEdit edit = sbac::MakeEdit(
      policies, e.at("policyNumber").get<std::string>(), *field,
      e.at("value").get<std::string>());
  Json out = sbac::ToJson(sbac::ReferenceOracle(edit, policies));
  out["edit"] = sbac::ToJson(edit);
  Print(out);
  return 0;
}

int OracleVignette(const std::string& input_path, int k) {
  Json input = ReadJsonFile(input_path);
  std::vector<sbac::PolicySchema> schemas = sbac::PolicySchemasFromJson(
      input.at("schemas"), "schemas", sbac::UnknownFields::kReject);
  if (input.contains("k")) k = input["k"].get<int>();
  std::vector<sbac::CandidateCase> candidates = sbac::EnumerateCandidates(schemas);
  sbac::SchemaIndex index = sbac::IndexSchemas(schemas);
  std::vector<sbac::CandidateCase> selected = sbac::SelectGreedy(candidates, index, k);
  Json all = Json::array();
  for (const sbac::CandidateCase& c : candidates) all.push_back(sbac::ToJson(c));
  Json picked = Json::array();
  for (const sbac::CandidateCase& c : selected) picked.push_back(sbac::ToJson(c));
  Print(Json{{"candidateCount", candidates.size()},
             {"candidates", std::move(all)},
             {"selected", std::move(picked)}});
  return 0;
}

int FixturesRecord(const std::string& archive_path, const std::string& dir) {
  Json archive = ReadJsonFile(archive_path);
  std::string session = archive.at("state").at("sessionId").get<std::string>();
  const Json& list = archive.at("fixtures");
  for (std::size_t i = 0; i < list.size(); ++i) {
    sbac::Fixture f = sbac::FixtureFromJson(list[i], sbac::IndexPath("fixtures", i));
    std::cout << sbac::WriteFixture(dir, session, f).string() << "\n";
  }
  return 0;
}

sbac::SchemaId SchemaForKind(sbac::CallKind kind) {
  using sbac::CallKind;
  using sbac::SchemaId;
  switch (kind) {
    case CallKind::kMarkIdentification:
    case CallKind::kReidentification: return SchemaId::kIdentification;
    case CallKind::kCiAnalysis: return SchemaId::kAnalysis;
    case CallKind::kIntentClassification: return SchemaId::kClassification;
    case CallKind::kDeepResolution: return SchemaId::kDeepResolution;
    case CallKind::kSketchSync: return SchemaId::kSketchSync;
    case CallKind::kPolicyPropagation: return SchemaId::kPolicyRipple;
    case CallKind::kInsightPropagation: return SchemaId::kInsightRipple;
    case CallKind::kFactorDecomposition: return SchemaId::kDecomposition;
    case CallKind::kStoryRealization: return SchemaId::kRealization;
  }
  return SchemaId::kAnalysis;
}

int FixturesVerify(const std::string& dir) {
  std::vector<sbac::Fixture> fixtures = sbac::LoadFixtureDir(dir);
  int gaps = 0;
  int rejected = 0;
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    const sbac::Fixture& f = fixtures[i];
    if (f.index != i) {
      std::cout << "gap: expected call " << i << ", found " << f.index << "\n";
      ++gaps;
    }
    try {
      sbac::ParseStructured(f.response, SchemaForKind(f.kind));
      std::cout << f.index << " " << sbac::ToString(f.kind) << " ok\n";
    } catch (const sbac::SchemaError& e) {
      // Rejected replies are legitimate when the service re-asked.
      std::cout << f.index << " " << sbac::ToString(f.kind)
                << " rejected: " << e.what() << "\n";
      ++rejected;
    }
  }
  std::cout << fixtures.size() << " fixtures, " << rejected << " rejected, "
            << gaps << " gaps\n";
  return gaps == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketch-based access control policy authoring service"};
  app.require_subcommand(1);

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string replay_dir, record_dir;
  CLI::App* serve = app.add_subcommand("serve", "Run the HTTP session API");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--replay-dir", replay_dir,
                    "Answer model calls from recorded fixtures");
  serve->add_option("--record-dir", record_dir, "Record every model reply");

  std::string archive, out;
  CLI::App* replay = app.add_subcommand("replay", "Re-drive an exported session");
  replay->add_option("archive", archive, "Exported session archive")->required();
  replay->add_option("--out", out, "Write the replayed state here");

  std::string input;
  int k = sbac::kDefaultVignetteCount;
  CLI::App* oracle = app.add_subcommand("oracle", "Run a deterministic oracle");
  oracle->require_subcommand(1);
  CLI::App* ripple = oracle->add_subcommand("ripple", "Rename / text-edit reference");
  ripple->add_option("input", input, "{policies, edit}")->required();
  CLI::App* vignette = oracle->add_subcommand("vignette", "Enumerate, score and select");
  vignette->add_option("input", input, "{schemas, k?}")->required();
  vignette->add_option("-k", k, "Cases to select");

  std::string dir;
  CLI::App* fixtures = app.add_subcommand("fixtures", "Recorded model replies");
  fixtures->require_subcommand(1);
  CLI::App* record = fixtures->add_subcommand("record", "Write an archive's replies as fixtures");
  record->add_option("archive", archive, "Exported session archive")->required();
  record->add_option("--dir", dir, "Fixture directory")->required();
  CLI::App* verify = fixtures->add_subcommand("verify", "Check a fixture directory");
  verify->add_option("dir", dir, "Fixture directory of one session")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return Serve(host, port, replay_dir, record_dir);
    if (*replay) return Replay(archive, out);
    if (*ripple) return OracleRipple(input);
    if (*vignette) return OracleVignette(input, k);
    if (*record) return FixturesRecord(archive, dir);
    if (*verify) return FixturesVerify(dir);
  } catch (const sbac::Error& e) {
    std::cerr << "error: " << sbac::ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
