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

#include "sbac/insight_ledger.h"

#include <algorithm>
#include <cctype>

#include "sbac/errors.h"
#include "sbac/mark_model.h"

namespace sbac {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct PatternKeywords {
  RiskPattern pattern;
  std::vector<std::string_view> keywords;
};

// First match wins, so the more specific patterns come first.
const std::vector<PatternKeywords>& Keywords() {
  static const std::vector<PatternKeywords> table = {
      {RiskPattern::kPrivilegeEscalation, {"escalat", "grant themselves", "elevate"}},
      {RiskPattern::kMissingAuthorization,
       {"no authorization", "without authorization", "unauthenticated",
        "no verification", "anyone can", "missing authorization"}},
      {RiskPattern::kInsecureDefaults, {"by default", "default access", "insecure default"}},
      {RiskPattern::kIndirectAccessPath, {"indirect", "bypass", "through another", "via the"}},
      {RiskPattern::kMissingInstanceScoping,
       {"all cameras", "all devices", "all doors", "any device", "every device",
        "not scoped", "unscoped", "instance"}},
      {RiskPattern::kTrustBoundaryViolation,
       {"visitor", "guest", "external", "contractor", "trust boundary"}},
      {RiskPattern::kOverPrivilege,
       {"full control", "excessive", "over-privilege", "overprivilege",
        "least privilege", "overly broad", "unrestricted"}},
  };
  return table;
}

}  // namespace

std::string_view ToString(Lifecycle lifecycle) {
  switch (lifecycle) {
    case Lifecycle::kActive: return "active";
    case Lifecycle::kAccepted: return "accepted";
    case Lifecycle::kDismissed: return "dismissed";
  }
  return "active";
}

std::optional<Lifecycle> LifecycleFromString(std::string_view s) {
  if (s == "active") return Lifecycle::kActive;
  if (s == "accepted") return Lifecycle::kAccepted;
  if (s == "dismissed") return Lifecycle::kDismissed;
  return std::nullopt;
}

std::optional<RiskPattern> TagRiskPattern(const InsightCard& card) {
  if (card.type != IssueType::kRisk) return std::nullopt;
  std::string text = Lower(card.heading + " " + card.description + " " +
                           card.rationale.consequence);
  for (const PatternKeywords& entry : Keywords()) {
    for (std::string_view kw : entry.keywords) {
      if (text.find(kw) != std::string::npos) return entry.pattern;
    }
  }
  return std::nullopt;
}

std::optional<int> IdNumber(std::string_view id, IssueType type) {
  std::string_view prefix = ToString(type);
  if (id.size() <= prefix.size() || id.substr(0, prefix.size()) != prefix) {
    return std::nullopt;
  }
  std::string_view digits = id.substr(prefix.size());
  if (digits.size() > 9) return std::nullopt;
  int n = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
    n = n * 10 + (c - '0');
  }
  return n;
}

void InsightLedger::Merge(std::span<const InsightCard> incoming) {
  std::set<std::string> seen;
  for (const InsightCard& card : incoming) {
    if (!IdNumber(card.id, card.type)) {
      Fail(ErrorCode::kDuplicateTypePrefixMismatch,
           "id " + card.id + " arrived typed " + std::string(ToString(card.type)));
    }
    if (const LedgerEntry* known = Find(card.id);
        known != nullptr && known->card.type != card.type) {
      Fail(ErrorCode::kDuplicateTypePrefixMismatch,
           "id " + card.id + " is on record as " +
               std::string(ToString(known->card.type)));
    }
    if (!seen.insert(card.id).second) {
      Fail(ErrorCode::kDuplicateTypePrefixMismatch,
           "id " + card.id + " appears twice in one response");
    }
  }
  for (const InsightCard& card : incoming) {
    if (LedgerEntry* entry = FindMutable(card.id)) {
      if (entry->lifecycle == Lifecycle::kDismissed) continue;
      UpdateCard(card);
      continue;
    }
    LedgerEntry entry;
    entry.card = card;
    entry.card.is_accepted.reset();
    entry.risk_pattern = TagRiskPattern(entry.card);
    entries_.push_back(std::move(entry));
  }
}

void InsightLedger::UpdateCard(const InsightCard& card) {
  LedgerEntry* entry = FindMutable(card.id);
  if (entry == nullptr) {
    Fail(ErrorCode::kUnknownInsight, "unknown insight " + card.id);
  }
  std::optional<bool> accepted = entry->card.is_accepted;
  entry->card = card;
  entry->card.is_accepted = accepted;
  entry->risk_pattern = TagRiskPattern(entry->card);
}

void InsightLedger::Accept(std::string_view id) {
  LedgerEntry* entry = FindMutable(id);
  if (entry == nullptr) {
    Fail(ErrorCode::kUnknownInsight, "unknown insight " + std::string(id));
  }
  if (entry->lifecycle == Lifecycle::kDismissed) {
    Fail(ErrorCode::kIllegalTransition,
         "insight " + std::string(id) + " was dismissed");
  }
  entry->lifecycle = Lifecycle::kAccepted;
  entry->card.is_accepted = true;
}

void InsightLedger::Dismiss(std::string_view id, std::string note) {
  LedgerEntry* entry = FindMutable(id);
  if (entry == nullptr) {
    Fail(ErrorCode::kUnknownInsight, "unknown insight " + std::string(id));
  }
  if (entry->lifecycle == Lifecycle::kDismissed) return;
  entry->lifecycle = Lifecycle::kDismissed;
  entry->note = std::move(note);
}

const LedgerEntry* InsightLedger::Find(std::string_view id) const {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const LedgerEntry& e) { return e.card.id == id; });
  return it == entries_.end() ? nullptr : &*it;
}

LedgerEntry* InsightLedger::FindMutable(std::string_view id) {
  return const_cast<LedgerEntry*>(std::as_const(*this).Find(id));
}

std::vector<InsightCard> InsightLedger::LiveCards() const {
  std::vector<InsightCard> out;
  for (const LedgerEntry& e : entries_) {
    if (e.lifecycle != Lifecycle::kDismissed) out.push_back(e.card);
  }
  return out;
}

std::vector<std::string> InsightLedger::DismissedIds() const {
  std::vector<std::string> out;
  for (const LedgerEntry& e : entries_) {
    if (e.lifecycle == Lifecycle::kDismissed) out.push_back(e.card.id);
  }
  return out;
}

int InsightLedger::MaxNumber(IssueType type) const {
  int best = 0;
  for (const LedgerEntry& e : entries_) {
    if (auto n = IdNumber(e.card.id, type)) best = std::max(best, *n);
  }
  return best;
}

void InsightLedger::RefreshDangling(const std::set<int>& known_marks) {
  for (LedgerEntry& e : entries_) {
    e.dangling_elements = DanglingElements(e.card.elements, known_marks);
  }
}

Json InsightLedger::ToJson() const {
  Json out = Json::array();
  for (const LedgerEntry& e : entries_) {
    Json item = Json{{"card", InsightToJson(e.card)},
                     {"lifecycle", sbac::ToString(e.lifecycle)},
                     {"note", e.note}};
    item["riskPattern"] =
        e.risk_pattern ? Json(InfoFor(*e.risk_pattern).name) : Json();
    item["danglingElements"] = e.dangling_elements;
    out.push_back(std::move(item));
  }
  return out;
}

InsightLedger InsightLedger::FromJson(const Json& value,
                                      const std::string& path) {
  if (!value.is_array()) throw SchemaError(path, "expected an array");
  InsightLedger ledger;
  for (std::size_t i = 0; i < value.size(); ++i) {
    ObjectReader r(value[i], IndexPath(path, i));
    LedgerEntry e;
    e.card = InsightFromJson(r.Required("card"), r.PathOf("card"),
                             UnknownFields::kPreserve);
    std::string lifecycle = r.RequiredString("lifecycle");
    auto parsed = LifecycleFromString(lifecycle);
    if (!parsed) throw SchemaError(r.PathOf("lifecycle"), "unknown lifecycle");
    e.lifecycle = *parsed;
    e.note = r.RequiredString("note");
    if (auto pattern = r.OptionalString("riskPattern")) {
      e.risk_pattern = RiskPatternFromString(*pattern);
      if (!e.risk_pattern) {
        throw SchemaError(r.PathOf("riskPattern"), "unknown risk pattern");
      }
    }
    e.dangling_elements = r.RequiredStringArray("danglingElements");
    r.Finish(UnknownFields::kReject);
    ledger.entries_.push_back(std::move(e));
  }
  return ledger;
}

}  // namespace sbac
