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

#ifndef DIALOFORGE_GOALS_HPP_
#define DIALOFORGE_GOALS_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <utility>

#include "dialoforge/corpus.hpp"
#include "dialoforge/kb.hpp"

namespace dialoforge {

// Sentence patterns for one domain. `{domain}`, `{value}` and `{items}` are
// the holes; slot patterns cover constraints and booking slots alike.
struct DomainTemplate {
  std::string intro = "You are looking for a {domain}.";
  std::map<std::string, std::string> slots;
  std::map<std::string, std::string> requests;  // requestable slot -> noun phrase
  std::string request_sentence = "Make sure you get the {items}.";
  std::string fallback = "If the booking fails how about {value}.";

  friend bool operator==(const DomainTemplate &, const DomainTemplate &) = default;
};

using GoalTemplates = std::map<Domain, DomainTemplate>;

// templates.json: domain -> {intro, slots, requests, request_sentence,
// fallback}. A directory resolves to templates.json. Throws SchemaError.
GoalTemplates load_templates(const std::filesystem::path &path);
void save_templates(const GoalTemplates &templates, const std::filesystem::path &path);

// Slots of the domain vocabulary that have no pattern (empty when complete).
std::vector<std::string> missing_templates(const GoalTemplates &templates, Domain d,
                                           const DomainSlots &slots);

// Deterministic instruction text. Throws MissingTemplate.
std::string render_goal(const Goal &goal, const GoalTemplates &templates);

struct GoalChanges {
  std::map<std::string, std::string> set;  // replace an existing slot value
  std::map<std::string, std::string> add;  // add a new constraint

  bool empty() const { return set.empty() && add.empty(); }
};

// Applies the changes to the first segment whose domain knows each slot.
// Informable values must occur in the KB. Throws UnknownSlot,
// ValueNotInVocabulary, InvalidArgument (set on a slot the goal lacks).
Goal perturb_goal(const Goal &goal, const GoalChanges &changes, const KnowledgeBase &kb);

// "slot=value" -> (slot, value). Throws InvalidArgument.
std::pair<std::string, std::string> parse_assignment(std::string_view text);

// Concatenates two terminated single-goal dialogs of different domains: the
// first loses its end-of-dialogue turn, the second follows verbatim.
// Throws SameDomain, Unterminated, InvalidArgument.
std::pair<Goal, Dialog> compose_multi_goal(const Dialog &first, const Goal &first_goal,
                                           const Dialog &second, const Goal &second_goal,
                                           const std::string &dialog_id);

}  // namespace dialoforge

#endif  // DIALOFORGE_GOALS_HPP_
