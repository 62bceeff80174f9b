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

#include "dialoforge/tagger.hpp"

#include <algorithm>
#include <cctype>

#include "dialoforge/delex.hpp"
#include "dialoforge/errors.hpp"
#include "dialoforge/text.hpp"

namespace dialoforge {

using nlohmann::json;

namespace {

bool is_integer(std::string_view s) {
  return !s.empty() && s.size() <= 3 &&
         std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::string class_token(const std::map<std::string, std::string> &options) {
  std::string out = "<v:";
  bool first = true;
  for (const auto &[slot, value] : options) {
    if (!first) out += '|';
    out += slot;
    first = false;
  }
  return out + ">";
}

}  // namespace

std::vector<ValueTagger::Mention> ValueTagger::mentions(const DomainLexicon &lex,
                                                        const std::vector<std::string> &tokens) {
  std::vector<Mention> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (is_placeholder(tokens[i])) {
      ++i;
      continue;
    }
    bool found = false;
    std::size_t max_len = std::min(lex.longest, tokens.size() - i);
    for (std::size_t len = max_len; len >= 1 && !found; --len) {
      std::vector<std::string> key(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                   tokens.begin() + static_cast<std::ptrdiff_t>(i + len));
      auto it = lex.phrases.find(key);
      if (it == lex.phrases.end()) continue;
      out.push_back({i, i + len, it->second});
      i += len;
      found = true;
    }
    if (found) continue;
    const std::string &t = tokens[i];
    std::map<std::string, std::string> options;
    if (parse_clock(t)) {
      for (const auto &s : lex.clock_slots) options[s] = t;
    } else if (is_integer(t)) {
      for (const auto &s : lex.number_slots) options[s] = t;
    }
    if (!options.empty()) out.push_back({i, i + 1, std::move(options)});
    ++i;
  }
  return out;
}

std::vector<std::string> ValueTagger::chooser_prefix(const std::vector<std::string> &tokens,
                                                     const Mention &m) {
  auto at = [&](std::ptrdiff_t idx) -> std::string {
    if (idx < 0) return "<s>";
    if (static_cast<std::size_t>(idx) >= tokens.size()) return "</s>";
    return tokens[static_cast<std::size_t>(idx)];
  };
  const auto b = static_cast<std::ptrdiff_t>(m.begin);
  const auto e = static_cast<std::ptrdiff_t>(m.end);
  // Farthest token first so backoff drops it first.
  return {at(b - 2), at(b - 1), at(e), class_token(m.options)};
}

std::string ValueTagger::choose(const DomainLexicon &lex, const std::vector<std::string> &tokens,
                                const Mention &m) {
  if (m.options.size() == 1) return m.options.begin()->first;
  std::string best = m.options.begin()->first;
  if (lex.chooser.target_vocab_size() == 0) return best;
  std::vector<double> dist = lex.chooser.distribution(chooser_prefix(tokens, m));
  double best_p = -1.0;
  auto consider = [&](const std::string &label) {
    int id = lex.chooser.token_id(label);
    double p = id >= 0 ? dist[static_cast<std::size_t>(id)] : 0.0;
    if (p > best_p) {
      best_p = p;
      best = label;
    }
  };
  for (const auto &[slot, value] : m.options) consider(slot);
  consider(std::string(kNoSlot));
  return best;
}

ValueTagger ValueTagger::build(const KnowledgeBase &kb, const Corpus &corpus) {
  ValueTagger tagger;
  auto add_value = [&](Domain d, const std::string &slot, const std::string &value) {
    if (!kb.slot_vocab().contains(d) || !kb.slots(d).contains(slot)) return;
    if (value.empty() || value == kDontCare) return;
    DomainLexicon &lex = tagger.domains_[d];
    if (parse_clock(value)) {
      lex.clock_slots.insert(slot);
    } else if (is_integer(value)) {
      lex.number_slots.insert(slot);
    } else {
      std::vector<std::string> key = tokenize(value);
      if (key.empty()) return;
      lex.phrases[key].emplace(slot, value);
      lex.longest = std::max(lex.longest, key.size());
    }
  };
  for (const auto &[d, slots] : kb.slot_vocab()) {
    tagger.domains_[d];
    if (!kb.has_domain(d)) continue;
    for (const Entity &e : kb.table(d)) {
      for (const auto &[slot, value] : e) {
        if (slots.informable.contains(slot)) add_value(d, slot, value);
      }
    }
  }
  for (const auto &[id, goal] : corpus.goals) {
    for (const GoalSegment &s : goal.segments) {
      for (const auto &[slot, value] : s.constraints) add_value(s.domain, slot, value);
      for (const auto &[slot, value] : s.booking) add_value(s.domain, slot, value);
      if (s.fallback) add_value(s.domain, s.fallback->first, s.fallback->second);
    }
  }
  for (const Dialog &dlg : corpus.dialogs) {
    for (const Turn &t : dlg.turns) {
      if (!t.annotation) continue;
      for (const auto &[slot, value] : t.annotation->belief.pairs()) {
        add_value(t.annotation->belief.domain(), slot, value);
      }
    }
  }

  // Slot choice for ambiguous mentions, labelled by the belief the agent
  // annotated right after the user turn.
  std::map<Domain, std::vector<NGramExample>> examples;
  for (const Dialog &dlg : corpus.dialogs) {
    for (std::size_t i = 0; i + 1 < dlg.turns.size(); ++i) {
      const Turn &user = dlg.turns[i];
      const Turn &agent = dlg.turns[i + 1];
      if (user.speaker != Speaker::User || !agent.annotation) continue;
      const BeliefState &belief = agent.annotation->belief;
      auto lex = tagger.domains_.find(belief.domain());
      if (lex == tagger.domains_.end()) continue;
      std::vector<std::string> tokens = tokenize(user.text);
      for (const Mention &m : mentions(lex->second, tokens)) {
        if (m.options.size() < 2) continue;
        std::string label(kNoSlot);
        for (const auto &[slot, value] : m.options) {
          if (belief.get(slot) == value) {
            label = slot;
            break;
          }
        }
        examples[belief.domain()].push_back({chooser_prefix(tokens, m), {label}});
      }
    }
  }
  for (auto &[d, ex] : examples) tagger.domains_[d].chooser.fit(ex);
  return tagger;
}

std::vector<ValueSpan> ValueTagger::tag(Domain d, const std::vector<std::string> &tokens) const {
  std::vector<ValueSpan> out;
  auto lex = domains_.find(d);
  if (lex == domains_.end()) return out;
  for (const Mention &m : mentions(lex->second, tokens)) {
    std::string slot = choose(lex->second, tokens, m);
    if (slot == kNoSlot) continue;
    out.push_back({m.begin, m.end, m.options.at(slot), slot});
  }
  return out;
}

std::vector<std::string> ValueTagger::delexicalize(Domain d,
                                                   const std::vector<std::string> &tokens) const {
  std::vector<ValueSpan> spans = tag(d, tokens);
  std::vector<std::string> out;
  std::size_t i = 0;
  for (const ValueSpan &s : spans) {
    out.insert(out.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i),
               tokens.begin() + static_cast<std::ptrdiff_t>(s.begin));
    out.push_back(placeholder_for(d, s.slot));
    i = s.end;
  }
  out.insert(out.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i), tokens.end());
  return out;
}

BeliefState ValueTagger::track(const BeliefState &previous, std::string_view user_text) const {
  BeliefState next = previous;
  for (const ValueSpan &s : tag(previous.domain(), tokenize(user_text))) next.set(s.slot, s.value);
  return next;
}

json ValueTagger::to_json() const {
  json out = json::object();
  for (const auto &[d, lex] : domains_) {
    json phrases = json::array();
    for (const auto &[key, options] : lex.phrases) phrases.push_back({key, options});
    out[std::string(domain_name(d))] = {{"phrases", std::move(phrases)},
                                        {"clock_slots", lex.clock_slots},
                                        {"number_slots", lex.number_slots},
                                        {"chooser", lex.chooser.to_json()}};
  }
  return out;
}

ValueTagger ValueTagger::from_json(const json &j) {
  ValueTagger tagger;
  try {
    for (const auto &[name, spec] : j.items()) {
      DomainLexicon &lex = tagger.domains_[domain_from_string(name)];
      for (const auto &row : spec.at("phrases")) {
        auto key = row.at(0).get<std::vector<std::string>>();
        lex.longest = std::max(lex.longest, key.size());
        lex.phrases[key] = row.at(1).get<std::map<std::string, std::string>>();
      }
      lex.clock_slots = spec.at("clock_slots").get<std::set<std::string>>();
      lex.number_slots = spec.at("number_slots").get<std::set<std::string>>();
      lex.chooser = NGramModel::from_json(spec.at("chooser"));
    }
  } catch (const json::exception &e) {
    throw SchemaError(std::string("malformed tagger: ") + e.what());
  }
  return tagger;
}

}  // namespace dialoforge
