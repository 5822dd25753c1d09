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

#include "sbac/prompts.h"

#include <optional>
#include <regex>
#include <sstream>

#include "sbac/crypto.h"
#include "sbac/errors.h"

namespace sbac {
namespace {

const std::regex& VariableToken() {
  static const std::regex re(R"(\{\{([A-Z][A-Z0-9_]*)\}\})");
  return re;
}

enum class DirectiveKind { kNone, kSwitch, kCase, kDefault, kEnd };

struct Directive {
  DirectiveKind kind = DirectiveKind::kNone;
  std::string argument;
};

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

Directive ParseDirective(std::string_view line) {
  std::string_view t = Trim(line);
  if (t.size() < 5 || t.substr(0, 2) != "{{" || t.substr(t.size() - 2) != "}}") {
    return {};
  }
  std::string_view inner = t.substr(2, t.size() - 4);
  auto with_arg = [&](std::string_view prefix,
                      DirectiveKind kind) -> std::optional<Directive> {
    if (inner.substr(0, prefix.size()) != prefix) return std::nullopt;
    return Directive{kind, std::string(Trim(inner.substr(prefix.size())))};
  };
  if (auto d = with_arg("#switch ", DirectiveKind::kSwitch)) return *d;
  if (auto d = with_arg("#case ", DirectiveKind::kCase)) return *d;
  if (inner == "#default") return {DirectiveKind::kDefault, ""};
  if (inner == "/switch") return {DirectiveKind::kEnd, ""};
  return {};
}

bool CaseMatches(std::string_view labels, std::string_view value) {
  std::size_t start = 0;
  while (start <= labels.size()) {
    std::size_t bar = labels.find('|', start);
    std::string_view label =
        Trim(labels.substr(start, bar == std::string_view::npos
                                      ? std::string_view::npos
                                      : bar - start));
    if (label == value) return true;
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return false;
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

const std::string& Lookup(const PromptContext& context, std::string_view name) {
  auto it = context.find(name);
  if (it == context.end()) {
    Fail(ErrorCode::kMissingPlaceholder,
         "missing placeholder " + std::string(name));
  }
  return it->second;
}

std::string SubstituteLine(std::string_view line, const PromptContext& context) {
  std::string out;
  std::string source(line);
  auto begin = std::sregex_iterator(source.begin(), source.end(),
                                    VariableToken());
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    out.append(source, last, m.position(0) - last);
    out += Lookup(context, m[1].str());
    last = m.position(0) + m.length(0);
  }
  std::string_view rest = std::string_view(source).substr(last);
  if (rest.find("{{") != std::string_view::npos) {
    Fail(ErrorCode::kInvalidArgument,
         "unrecognized template token in \"" + std::string(line) + "\"");
  }
  out += rest;
  return out;
}

}  // namespace

std::string_view AssetName(PromptId id) {
  switch (id) {
    case PromptId::kMarkIdentification: return "mark_identification";
    case PromptId::kCiAnalysis: return "ci_analysis";
    case PromptId::kIntentClassification: return "intent_classification";
    case PromptId::kDeepResolution: return "deep_resolution";
    case PromptId::kSketchSync: return "sketch_sync";
    case PromptId::kPolicyPropagation: return "policy_propagation";
    case PromptId::kInsightPropagation: return "insight_propagation";
    case PromptId::kFactorDecomposition: return "factor_decomposition";
    case PromptId::kStoryRealization: return "story_realization";
    case PromptId::kMonolithicTest: return "monolithic_test";
  }
  return "";
}

std::string_view PromptText(PromptId id) {
  std::string_view name = AssetName(id);
  for (std::size_t i = 0; i < internal::kEmbeddedPromptCount; ++i) {
    if (name == internal::kEmbeddedPrompts[i].name) {
      return internal::kEmbeddedPrompts[i].text;
    }
  }
  Fail(ErrorCode::kNotFound, "prompt asset " + std::string(name));
}

std::set<std::string> TemplateVariables(std::string_view text) {
  std::set<std::string> names;
  for (std::string_view line : SplitLines(text)) {
    Directive d = ParseDirective(line);
    if (d.kind == DirectiveKind::kSwitch) {
      names.insert(d.argument);
      continue;
    }
    if (d.kind != DirectiveKind::kNone) continue;
    std::string source(line);
    for (auto it = std::sregex_iterator(source.begin(), source.end(),
                                        VariableToken());
         it != std::sregex_iterator(); ++it) {
      names.insert((*it)[1].str());
    }
  }
  return names;
}

std::string RenderTemplate(std::string_view text,
                           const PromptContext& context) {
  std::vector<std::string_view> lines = SplitLines(text);
  std::vector<std::string> out;

  // Inside a switch: `selector` is the selector value, `matched` records
  // whether an earlier branch already fired, `emitting` whether the current
  // branch is live.
  bool in_switch = false;
  bool matched = false;
  bool emitting = true;
  std::string selector;

  for (std::string_view line : lines) {
    Directive d = ParseDirective(line);
    switch (d.kind) {
      case DirectiveKind::kSwitch:
        if (in_switch) {
          Fail(ErrorCode::kInvalidArgument, "nested switch blocks");
        }
        in_switch = true;
        matched = false;
        emitting = false;
        selector = Lookup(context, d.argument);
        continue;
      case DirectiveKind::kCase:
        if (!in_switch) Fail(ErrorCode::kInvalidArgument, "case outside switch");
        emitting = !matched && CaseMatches(d.argument, selector);
        matched = matched || emitting;
        continue;
      case DirectiveKind::kDefault:
        if (!in_switch) {
          Fail(ErrorCode::kInvalidArgument, "default outside switch");
        }
        emitting = !matched;
        matched = true;
        continue;
      case DirectiveKind::kEnd:
        if (!in_switch) {
          Fail(ErrorCode::kInvalidArgument, "unbalanced switch end");
        }
        in_switch = false;
        emitting = true;
        continue;
      case DirectiveKind::kNone:
        break;
    }
    if (in_switch && !emitting) continue;
    out.push_back(SubstituteLine(line, context));
  }
  if (in_switch) Fail(ErrorCode::kInvalidArgument, "unterminated switch");

  std::string result;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i > 0) result += '\n';
    result += out[i];
  }
  if (!text.empty() && text.back() == '\n') result += '\n';
  return result;
}

std::string RenderPrompt(PromptId id, const PromptContext& context) {
  return RenderTemplate(PromptText(id), context);
}

std::vector<ManifestEntry> ParseManifest(std::string_view manifest) {
  std::vector<ManifestEntry> entries;
  for (std::string_view line : SplitLines(manifest)) {
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::size_t space = line.find("  ");
    if (space == std::string_view::npos) {
      Fail(ErrorCode::kInvalidArgument,
           "malformed manifest line \"" + std::string(line) + "\"");
    }
    entries.push_back({std::string(line.substr(0, space)),
                       std::string(Trim(line.substr(space + 2)))});
  }
  return entries;
}

std::vector<std::string> VerifyPromptManifest() {
  std::vector<std::string> problems;
  std::vector<ManifestEntry> entries = ParseManifest(internal::kPromptManifest);
  std::set<std::string> listed;
  for (const ManifestEntry& e : entries) {
    listed.insert(e.file);
    const internal::EmbeddedPrompt* found = nullptr;
    for (std::size_t i = 0; i < internal::kEmbeddedPromptCount; ++i) {
      if (e.file == std::string(internal::kEmbeddedPrompts[i].name) + ".txt") {
        found = &internal::kEmbeddedPrompts[i];
      }
    }
    if (found == nullptr) {
      problems.push_back(e.file + ": listed but not embedded");
      continue;
    }
    std::string digest = Sha256Hex(found->text);
    if (digest != e.sha256) {
      problems.push_back(e.file + ": digest " + digest + " != manifest " +
                         e.sha256);
    }
  }
  for (std::size_t i = 0; i < internal::kEmbeddedPromptCount; ++i) {
    std::string file = std::string(internal::kEmbeddedPrompts[i].name) + ".txt";
    if (!listed.count(file)) problems.push_back(file + ": not in manifest");
  }
  return problems;
}

}  // namespace sbac
