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

#ifndef SBAC_SESSION_SERVICE_H_
#define SBAC_SESSION_SERVICE_H_

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "sbac/llm_gateway.h"
#include "sbac/session_state.h"
#include "sbac/session_store.h"
#include "sbac/vignette_engine.h"

namespace sbac {

// Identification of the current sketch. Uses mark_identification the first
// time and reidentification afterwards. One re-ask, then
// Error(kIdentificationInvalid).
void IdentifySketch(SessionState& session, const Gateway& gateway,
                    const std::string& raw_png, const std::string& numbered_png);

// Applies an accepted sketch-sync event batch to the stored sketch.
void ApplySketchEvents(std::vector<RawShape>& shapes, const Json& events);

struct ServiceOptions {
  int vignette_k = kDefaultVignetteCount;
  // Session id source; random hex when unset.
  std::function<std::string()> id_generator;
};

// One mutating operation, by name, applied to `session`. This is the single
// code path used by live requests and by journal replay.
//
//   create          {scenarioContext}
//   sketch          {shapes}
//   identify        {raw, numbered}                   (base64 PNG)
//   stage           {target, raw?, numbered?}
//   analyze         {som}
//   clarify         {insightId, message}
//   insight         {insightId, action: accept|dismiss}
//   policy_edit     {policyNumber, field, value}
//   test            {}
//   sketch_proposal {accept}
//   shadow          {accept}
Json ApplyOperation(SessionState& session, const Gateway& gateway,
                    const ServiceOptions& options, std::string_view op,
                    const Json& args);

// Portable archive: state, call fixtures and test diagnostics.
Json ExportArchive(const SessionState& session);

// Rebuilds a session from an archive by re-driving its journal against the
// archived model replies. Throws Error(kFixtureMismatch) when the archive
// is missing a reply or a request no longer matches.
SessionState ReplayArchive(const Json& archive,
                           const ServiceOptions& options = {});

class SessionService {
 public:
  SessionService(SessionStore& store, const Gateway& gateway,
                 ServiceOptions options = {});

  SessionState Create(const std::string& scenario_context);
  // Throws Error(kNotFound).
  SessionState Get(std::string_view id) const;

  // Serialized per session: a second concurrent call on the same session
  // gets Error(kBusy). The operation's result view is returned.
  Json Mutate(std::string_view id, std::string_view op, const Json& args);

  Json Export(std::string_view id) const;

  const ServiceOptions& options() const { return options_; }

 private:
  std::shared_ptr<std::mutex> LockFor(std::string_view id);

  SessionStore& store_;
  const Gateway& gateway_;
  ServiceOptions options_;
  std::mutex locks_mu_;
  std::map<std::string, std::shared_ptr<std::mutex>, std::less<>> locks_;
};

}  // namespace sbac

#endif  // SBAC_SESSION_SERVICE_H_
