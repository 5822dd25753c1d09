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

#include "sbac/engine_support.h"

namespace sbac {

void RequireValid(const ValidationReport& report, std::string_view what) {
  if (report.empty()) return;
  throw SchemaError("$", std::string(what) + " invalid: " + Describe(report));
}

std::set<int> KnownMarks(const SessionState& session) {
  return MarkNumbers(session.mark_map);
}

std::string EntityMapText(const SessionState& session) {
  std::string out;
  for (const Entity& e : session.entities) {
    out += EntityLine(e);
    out += '\n';
  }
  return out;
}

std::string PoliciesText(const std::vector<Policy>& policies) {
  return PoliciesToJson(policies).dump(2);
}

std::string InsightsText(const std::vector<InsightCard>& cards) {
  return InsightsToJson(cards).dump(2);
}

std::string ReaskNotice(const std::string& previous_reply,
                        const std::string& violation) {
  return "Your previous response was rejected: " + violation +
         "\n\nPrevious response:\n" + previous_reply +
         "\n\nRespond again with one complete JSON object in the required "
         "format.";
}

}  // namespace sbac
