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

#ifndef SBAC_INSIGHT_LEDGER_H_
#define SBAC_INSIGHT_LEDGER_H_

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbac/json_util.h"
#include "sbac/policy_model.h"

namespace sbac {

enum class Lifecycle { kActive, kAccepted, kDismissed };

std::string_view ToString(Lifecycle lifecycle);
std::optional<Lifecycle> LifecycleFromString(std::string_view s);

struct LedgerEntry {
  InsightCard card;
  Lifecycle lifecycle = Lifecycle::kActive;
  std::string note;  // why it was dismissed, when it was
  std::optional<RiskPattern> risk_pattern;
  std::vector<std::string> dangling_elements;

  bool operator==(const LedgerEntry&) const = default;
};

// Post-hoc tag for reporting; never blocks anything.
std::optional<RiskPattern> TagRiskPattern(const InsightCard& card);

// Id-ordered history of every card the session has seen. Ids are never
// reused and entries are never removed.
class InsightLedger {
 public:
  // Known ids take the incoming text unless dismissed; new ids append as
  // active. Incoming isAccepted is ignored. Cards missing from `incoming`
  // are kept. Validates everything before mutating: throws
  // Error(kDuplicateTypePrefixMismatch) if an id's prefix disagrees with its
  // type or with the type already on record.
  void Merge(std::span<const InsightCard> incoming);

  // Throws Error(kUnknownInsight) / Error(kIllegalTransition).
  void Accept(std::string_view id);
  void Dismiss(std::string_view id, std::string note);

  // Replaces the text of a live card (ripple updates). Lifecycle untouched.
  void UpdateCard(const InsightCard& card);

  const LedgerEntry* Find(std::string_view id) const;
  bool Contains(std::string_view id) const { return Find(id) != nullptr; }

  // Active and accepted cards, in ledger order.
  std::vector<InsightCard> LiveCards() const;
  std::vector<std::string> DismissedIds() const;
  const std::vector<LedgerEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  // Highest numeric suffix seen for ids of `type`, 0 if none.
  int MaxNumber(IssueType type) const;

  void RefreshDangling(const std::set<int>& known_marks);

  Json ToJson() const;
  static InsightLedger FromJson(const Json& value, const std::string& path);

  bool operator==(const InsightLedger&) const = default;

 private:
  LedgerEntry* FindMutable(std::string_view id);

  std::vector<LedgerEntry> entries_;
};

// "risk12" -> 12 when the prefix is `type`'s name.
std::optional<int> IdNumber(std::string_view id, IssueType type);

}  // namespace sbac

#endif  // SBAC_INSIGHT_LEDGER_H_
