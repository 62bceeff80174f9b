// Copyright 2026 The dialoforge Authors.
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

#include "dialoforge/delex.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "dialoforge/corpus.hpp"
#include "dialoforge/errors.hpp"
#include "dialoforge/text.hpp"

namespace dialoforge {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

struct Candidate {
  std::string value;  // lower-cased
  std::string placeholder;
};

}  // namespace

std::string placeholder_for(Domain domain, std::string_view slot) {
  if (slot == "name" || slot == "reference" || slot == "address") {
    return "[" + std::string(domain_name(domain)) + "_" + std::string(slot) + "]";
  }
  if (slot == "people") return "[value_count]";
  return "[value_" + std::string(slot) + "]";
}

std::string slot_for_placeholder(std::string_view placeholder) {
  if (!is_placeholder(placeholder)) return std::string(placeholder);
  std::string_view body = placeholder.substr(1, placeholder.size() - 2);
  std::size_t us = body.find('_');
  if (us == std::string_view::npos) return std::string(body);
  std::string_view head = body.substr(0, us);
  std::string_view tail = body.substr(us + 1);
  if (head == "value") return tail == "count" ? "people" : std::string(tail);
  return std::string(tail);
}

std::set<std::string> placeholder_inventory(Domain domain, const DomainSlots &slots) {
  std::set<std::string> out;
  for (const std::string &s : slots.all()) out.insert(placeholder_for(domain, s));
  out.insert(placeholder_for(domain, "reference"));
  return out;
}

std::string delexicalize(std::string_view text, const ValueRecord &record, Domain domain) {
  std::vector<Candidate> cands;
  for (const auto &[slot, value] : record) {
    std::string v = to_lower(trim(value));
    if (v.empty() || v == kDontCare) continue;
    cands.push_back({v, placeholder_for(domain, slot)});
  }
  // Longest first; ties resolved by placeholder name for determinism.
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate &a, const Candidate &b) {
    if (a.value.size() != b.value.size()) return a.value.size() > b.value.size();
    return a.placeholder < b.placeholder;
  });
  const std::string lower = to_lower(text);
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '[') {
      std::size_t close = text.find(']', i);
      if (close != std::string_view::npos) {
        out.append(text.substr(i, close - i + 1));
        i = close + 1;
        continue;
      }
    }
    bool at_boundary = i == 0 || !is_alnum(text[i - 1]);
    bool replaced = false;
    if (at_boundary) {
      for (const Candidate &c : cands) {
        if (lower.compare(i, c.value.size(), c.value) != 0) continue;
        std::size_t end = i + c.value.size();
        if (end < text.size() && is_alnum(text[end]) && is_alnum(c.value.back())) continue;
        out += c.placeholder;
        i = end;
        replaced = true;
        break;
      }
    }
    if (!replaced) out.push_back(text[i++]);
  }
  return out;
}

namespace {

std::string relex_impl(std::string_view text, const ValueRecord &record, bool strict,
                       int *unresolved) {
  std::string out;
  int missing = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '[') {
      std::size_t close = text.find(']', i);
      if (close != std::string_view::npos) {
        std::string_view ph = text.substr(i, close - i + 1);
        std::string slot = slot_for_placeholder(ph);
        auto it = record.find(slot);
        if (it == record.end() && slot == "people") it = record.find("count");
        if (it != record.end()) {
          out += it->second;
        } else if (strict) {
          throw UnresolvedPlaceholder("no value for placeholder " + std::string(ph));
        } else {
          out.append(ph);
          ++missing;
        }
        i = close + 1;
        continue;
      }
    }
    out.push_back(text[i++]);
  }
  if (unresolved) *unresolved = missing;
  return out;
}

}  // namespace

std::string relexicalize(std::string_view text, const ValueRecord &record) {
  return relex_impl(text, record, true, nullptr);
}

std::string relexicalize_partial(std::string_view text, const ValueRecord &record,
                                 int *unresolved) {
  return relex_impl(text, record, false, unresolved);
}

ValueRecord goal_grounding(const GoalSegment &segment) {
  ValueRecord record = segment.constraints;
  for (const auto &[slot, value] : segment.booking) record[slot] = value;
  if (segment.fallback) record["alt_" + segment.fallback->first] = segment.fallback->second;
  return record;
}

}  // namespace dialoforge
