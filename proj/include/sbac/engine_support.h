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

#ifndef SBAC_ENGINE_SUPPORT_H_
#define SBAC_ENGINE_SUPPORT_H_

#include <optional>
#include <set>
#include <string>
#include <utility>

#include "sbac/errors.h"
#include "sbac/llm_gateway.h"
#include "sbac/policy_model.h"
#include "sbac/session_state.h"

namespace sbac {

// Throws SchemaError("$", ...) when `report` is not empty.
void RequireValid(const ValidationReport& report, std::string_view what);

std::set<int> KnownMarks(const SessionState& session);

// "[3] Subject: Alice" lines, one per entity.
std::string EntityMapText(const SessionState& session);

std::string PoliciesText(const std::vector<Policy>& policies);
std::string InsightsText(const std::vector<InsightCard>& cards);

// Text turn appended on a re-ask.
std::string ReaskNotice(const std::string& previous_reply,
                        const std::string& violation);

struct AskOutcome {
  std::string last_violation;  // empty on success
  int attempts = 0;
};

// Sends `request`; on a SchemaError (from `parse`, which also validates)
// re-asks up to `reasks` times with the violation appended. Transport
// failures propagate. Returns nullopt when every attempt was rejected.
template <typename Parse>
auto AskValidated(const Gateway& gateway, SessionState& session,
                  ChatRequest request, Parse&& parse, int reasks,
                  AskOutcome* outcome = nullptr)
    -> std::optional<decltype(parse(std::string()))> {
  AskOutcome local;
  AskOutcome& out = outcome ? *outcome : local;
  for (int attempt = 0; attempt <= reasks; ++attempt) {
    std::string reply =
        gateway.Invoke(request, session.session_id, session.call_log);
    ++out.attempts;
    try {
      auto parsed = parse(reply);
      out.last_violation.clear();
      return parsed;
    } catch (const SchemaError& e) {
      out.last_violation = e.what();
      request.user_turns.push_back(TextPart{ReaskNotice(reply, e.what())});
    }
  }
  return std::nullopt;
}

}  // namespace sbac

#endif  // SBAC_ENGINE_SUPPORT_H_
