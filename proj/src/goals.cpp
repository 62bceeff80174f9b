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

#include "dialoforge/goals.hpp"

#include <fstream>

#include <json.hpp>

#include "dialoforge/errors.hpp"
#include "dialoforge/text.hpp"

namespace dialoforge {

using nlohmann::json;

namespace {

std::string fill(std::string pattern, std::string_view hole, std::string_view value) {
  const std::string key = "{" + std::string(hole) + "}";
  for (std::size_t pos = pattern.find(key); pos != std::string::npos;
       pos = pattern.find(key, pos + value.size())) {
    pattern.replace(pos, key.size(), value);
  }
  return pattern;
}

// "a", "a and b", "a, b and c"
std::string enumerate(const std::vector<std::string> &items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += i + 1 == items.size() ? " and " : ", ";
    out += items[i];
  }
  return out;
}

}  // namespace

GoalTemplates load_templates(const std::filesystem::path &path) {
  std::filesystem::path file =
      std::filesystem::is_directory(path) ? path / "templates.json" : path;
  std::ifstream in(file);
  if (!in) throw SchemaError("cannot open " + file.string());
  GoalTemplates out;
  try {
    json j = json::parse(in);
    for (const auto &[name, spec] : j.items()) {
      DomainTemplate t;
      t.intro = spec.value("intro", t.intro);
      t.slots = spec.value("slots", std::map<std::string, std::string>{});
      t.requests = spec.value("requests", std::map<std::string, std::string>{});
      t.request_sentence = spec.value("request_sentence", t.request_sentence);
      t.fallback = spec.value("fallback", t.fallback);
      out[domain_from_string(name)] = std::move(t);
    }
  } catch (const json::exception &e) {
    throw SchemaError(file.string() + ": " + e.what());
  }
  return out;
}

void save_templates(const GoalTemplates &templates, const std::filesystem::path &path) {
  json j = json::object();
  for (const auto &[d, t] : templates) {
    j[std::string(domain_name(d))] = {{"intro", t.intro},
                                      {"slots", t.slots},
                                      {"requests", t.requests},
                                      {"request_sentence", t.request_sentence},
                                      {"fallback", t.fallback}};
  }
  std::filesystem::path file = path;
  if (std::filesystem::is_directory(path) || !path.has_extension()) {
    std::filesystem::create_directories(path);
    file = path / "templates.json";
  }
  std::ofstream(file) << j.dump(2) << "\n";
}

std::vector<std::string> missing_templates(const GoalTemplates &templates, Domain d,
                                           const DomainSlots &slots) {
  std::vector<std::string> out;
  auto it = templates.find(d);
  for (const std::string &s : slots.informable) {
    if (it == templates.end() || !it->second.slots.contains(s)) out.push_back(s);
  }
  for (const std::string &s : slots.booking) {
    if (it == templates.end() || !it->second.slots.contains(s)) out.push_back(s);
  }
  for (const std::string &s : slots.requestable) {
    if (it == templates.end() || !it->second.requests.contains(s)) out.push_back(s);
  }
  return out;
}

std::string render_goal(const Goal &goal, const GoalTemplates &templates) {
  std::vector<std::string> sentences;
  for (const GoalSegment &seg : goal.segments) {
    const std::string dname(domain_name(seg.domain));
    auto tit = templates.find(seg.domain);
    if (tit == templates.end()) throw MissingTemplate("no templates for domain " + dname);
    const DomainTemplate &t = tit->second;
    sentences.push_back(fill(t.intro, "domain", dname));
    auto slot_sentence = [&](const std::string &slot, const std::string &value) {
      auto p = t.slots.find(slot);
      if (p == t.slots.end()) throw MissingTemplate(dname + "." + slot);
      sentences.push_back(fill(fill(p->second, "domain", dname), "value", value));
    };
    for (const auto &[slot, value] : seg.constraints) slot_sentence(slot, value);
    for (const auto &[slot, value] : seg.booking) slot_sentence(slot, value);
    if (seg.fallback) {
      sentences.push_back(fill(fill(t.fallback, "domain", dname), "value", seg.fallback->second));
    }
    if (!seg.requestables.empty()) {
      std::vector<std::string> items;
      for (const std::string &r : seg.requestables) {
        auto p = t.requests.find(r);
        if (p == t.requests.end()) throw MissingTemplate(dname + ".request." + r);
        items.push_back(p->second);
      }
      sentences.push_back(fill(t.request_sentence, "items", enumerate(items)));
    }
  }
  return join(sentences, " ");
}

std::pair<std::string, std::string> parse_assignment(std::string_view text) {
  auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw InvalidArgument("expected slot=value, got '" + std::string(text) + "'");
  }
  std::string slot = trim(text.substr(0, eq));
  std::string value = trim(text.substr(eq + 1));
  if (slot.empty() || value.empty()) {
    throw InvalidArgument("expected slot=value, got '" + std::string(text) + "'");
  }
  return {slot, value};
}

Goal perturb_goal(const Goal &goal, const GoalChanges &changes, const KnowledgeBase &kb) {
  Goal out = goal;
  auto segment_for = [&](const std::string &slot) -> GoalSegment & {
    for (GoalSegment &s : out.segments) {
      if (kb.slot_vocab().contains(s.domain) && kb.slots(s.domain).contains(slot)) return s;
    }
    throw UnknownSlot("no segment of goal " + goal.goal_id + " has slot '" + slot + "'");
  };
  auto check_value = [&](const GoalSegment &s, const std::string &slot, const std::string &value) {
    const DomainSlots &vocab = kb.slots(s.domain);
    if (!vocab.is_attribute(slot) || value == kDontCare) return;
    if (!kb.values(s.domain, slot).contains(value)) {
      throw ValueNotInVocabulary("'" + value + "' is not a known " +
                                 std::string(domain_name(s.domain)) + " " + slot);
    }
  };
  for (const auto &[slot, value] : changes.set) {
    GoalSegment &s = segment_for(slot);
    check_value(s, slot, value);
    if (auto it = s.constraints.find(slot); it != s.constraints.end()) {
      it->second = value;
    } else if (auto b = s.booking.find(slot); b != s.booking.end()) {
      b->second = value;
    } else {
      throw InvalidArgument("goal " + goal.goal_id + " has no '" + slot + "' to replace");
    }
  }
  for (const auto &[slot, value] : changes.add) {
    GoalSegment &s = segment_for(slot);
    check_value(s, slot, value);
    if (kb.slots(s.domain).booking.contains(slot)) {
      s.booking[slot] = value;
    } else {
      s.constraints[slot] = value;
    }
  }
  return out;
}

std::pair<Goal, Dialog> compose_multi_goal(const Dialog &first, const Goal &first_goal,
                                           const Dialog &second, const Goal &second_goal,
                                           const std::string &dialog_id) {
  if (first_goal.segments.size() != 1 || second_goal.segments.size() != 1) {
    throw InvalidArgument("only single-goal dialogs can be composed");
  }
  if (!first.terminated || first.turns.empty() || !first.turns.back().is_end_of_dialogue()) {
    throw Unterminated("dialog " + first.dialog_id + " did not terminate");
  }
  if (!second.terminated || second.turns.empty() || !second.turns.back().is_end_of_dialogue()) {
    throw Unterminated("dialog " + second.dialog_id + " did not terminate");
  }
  if (first_goal.segments[0].domain == second_goal.segments[0].domain) {
    throw SameDomain("both dialogs are in domain " +
                     std::string(domain_name(first_goal.segments[0].domain)));
  }
  Goal goal;
  goal.goal_id = first_goal.goal_id + "+" + second_goal.goal_id;
  goal.segments = {first_goal.segments[0], second_goal.segments[0]};

  Dialog dialog;
  dialog.dialog_id = dialog_id;
  dialog.goal_id = goal.goal_id;
  dialog.turns.assign(first.turns.begin(), first.turns.end() - 1);
  dialog.turns.insert(dialog.turns.end(), second.turns.begin(), second.turns.end());
  dialog.terminated = true;
  dialog.source = first.source == Provenance::Human && second.source == Provenance::Human
                      ? Provenance::Human
                      : Provenance::Generated;
  return {std::move(goal), std::move(dialog)};
}

}  // namespace dialoforge
