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

#include "dialoforge/belief.hpp"

#include <algorithm>
#include <cctype>

#include "dialoforge/errors.hpp"
#include "dialoforge/text.hpp"

namespace dialoforge {

namespace {

enum class Kind { Word, Semi, Equals };

struct Lexeme {
  Kind kind;
  std::string text;
};

std::vector<Lexeme> lex(std::string_view text) {
  std::vector<Lexeme> out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back({Kind::Word, word});
    word.clear();
  };
  for (char c : text) {
    if (c == ';') {
      flush();
      out.push_back({Kind::Semi, ";"});
    } else if (c == '=') {
      flush();
      out.push_back({Kind::Equals, "="});
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      word.push_back(c);
    }
  }
  flush();
  return out;
}

}  // namespace

BeliefState::BeliefState(Domain domain, std::vector<Pair> pairs) : domain_(domain) {
  for (auto &[slot, value] : pairs) set(std::move(slot), std::move(value));
}

std::optional<std::string> BeliefState::get(std::string_view slot) const {
  auto it = std::lower_bound(pairs_.begin(), pairs_.end(), slot,
                             [](const Pair &p, std::string_view s) { return p.first < s; });
  if (it != pairs_.end() && it->first == slot) return it->second;
  return std::nullopt;
}

void BeliefState::set(std::string slot, std::string value) {
  auto it = std::lower_bound(pairs_.begin(), pairs_.end(), slot,
                             [](const Pair &p, const std::string &s) { return p.first < s; });
  if (it != pairs_.end() && it->first == slot) {
    it->second = std::move(value);
  } else {
    pairs_.insert(it, {std::move(slot), std::move(value)});
  }
}

void BeliefState::erase(std::string_view slot) {
  std::erase_if(pairs_, [&](const Pair &p) { return p.first == slot; });
}

std::map<std::string, std::string> BeliefState::as_map() const {
  return {pairs_.begin(), pairs_.end()};
}

BeliefState parse_belief(std::string_view text) {
  const std::vector<Lexeme> lx = lex(text);
  std::size_t pos = 0;
  if (lx.empty() || lx[0].kind != Kind::Word) throw ParseError(0, "domain");
  if (lx.size() > 1 && lx[1].kind == Kind::Word) throw ParseError(1, "';'");
  BeliefState state(domain_from_string(to_lower(lx[0].text)));
  pos = 1;
  while (pos < lx.size()) {
    if (lx[pos].kind != Kind::Semi) throw ParseError(pos, "';'");
    ++pos;
    if (pos >= lx.size() || lx[pos].kind != Kind::Word) throw ParseError(pos, "slot name");
    std::string slot = to_lower(lx[pos].text);
    ++pos;
    if (pos >= lx.size() || lx[pos].kind != Kind::Equals) throw ParseError(pos, "'='");
    ++pos;
    std::vector<std::string> value;
    while (pos < lx.size() && lx[pos].kind == Kind::Word) value.push_back(lx[pos++].text);
    if (value.empty()) throw ParseError(pos, "value");
    state.set(std::move(slot), join(value));
  }
  return state;
}

std::string serialize_belief(const BeliefState &state) {
  std::string out(domain_name(state.domain()));
  for (const auto &[slot, value] : state.pairs()) {
    out += " ; ";
    out += slot;
    out += " = ";
    out += value;
  }
  return out;
}

BeliefState repair_belief(std::string_view text) {
  std::vector<std::string> parts = split(text, ';');
  std::string head = trim(parts[0]);
  if (head.empty() || head.find('=') != std::string::npos ||
      head.find(' ') != std::string::npos || !parse_domain(to_lower(head))) {
    throw UnparseableBelief("no domain token in generated belief '" + std::string(text) + "'");
  }
  std::string rebuilt = to_lower(head);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    std::vector<std::string> kv = split(parts[i], '=');
    if (kv.size() != 2) continue;
    std::string slot = trim(kv[0]);
    std::string value = trim(kv[1]);
    if (slot.empty() || value.empty() || slot.find(' ') != std::string::npos) continue;
    rebuilt += " ; " + slot + " = " + value;
  }
  try {
    return parse_belief(rebuilt);
  } catch (const ParseError &e) {
    throw UnparseableBelief(e.what());
  }
}

BeliefDiff diff_belief(const BeliefState &from, const BeliefState &to) {
  if (from.domain() != to.domain()) {
    throw DomainMismatch("cannot diff " + std::string(domain_name(from.domain())) + " against " +
                         std::string(domain_name(to.domain())));
  }
  BeliefDiff diff;
  const auto a = from.as_map();
  const auto b = to.as_map();
  for (const auto &[slot, value] : a) {
    auto it = b.find(slot);
    if (it == b.end()) {
      diff.removed.emplace(slot, value);
    } else if (it->second != value) {
      diff.changed.emplace(slot, std::make_pair(value, it->second));
    }
  }
  for (const auto &[slot, value] : b) {
    if (!a.contains(slot)) diff.added.emplace(slot, value);
  }
  return diff;
}

}  // namespace dialoforge
