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

#ifndef DIALOFORGE_CORPUS_HPP_
#define DIALOFORGE_CORPUS_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dialoforge/belief.hpp"
#include "dialoforge/domain.hpp"
#include "dialoforge/kb.hpp"

namespace dialoforge {

struct GoalSegment {
  Domain domain = Domain::Restaurant;
  std::map<std::string, std::string> constraints;
  std::set<std::string> requestables;
  std::map<std::string, std::string> booking;
  // (slot, alternate value) to retry with when the first booking fails.
  std::optional<std::pair<std::string, std::string>> fallback;

  // Value the fallback replaces (from booking, else constraints).
  std::optional<std::string> primary_value(const std::string &slot) const;

  friend bool operator==(const GoalSegment &, const GoalSegment &) = default;
};

struct Goal {
  std::string goal_id;
  std::vector<GoalSegment> segments;

  friend bool operator==(const Goal &, const Goal &) = default;
};

// Annotation recorded on every simulated (or annotated) agent turn.
struct AgentAnnotation {
  BeliefState belief;
  int kb_count = 0;
  std::optional<BookingResult> booking;

  friend bool operator==(const AgentAnnotation &, const AgentAnnotation &) = default;
};

// One utterance. Agent text is stored delexicalized; user text lexicalized.
struct Turn {
  Speaker speaker = Speaker::User;
  std::string text;
  std::optional<AgentAnnotation> annotation;

  bool is_end_of_dialogue() const;

  friend bool operator==(const Turn &, const Turn &) = default;
};

enum class Provenance { Human, Generated };

struct Dialog {
  std::string dialog_id;
  std::string goal_id;
  std::vector<Turn> turns;
  bool terminated = false;
  Provenance source = Provenance::Human;

  friend bool operator==(const Dialog &, const Dialog &) = default;
};

enum class Split { Train, Valid, Test };

std::string_view split_name(Split s);

struct Corpus {
  std::vector<Dialog> dialogs;
  std::map<std::string, Goal> goals;
  Split split = Split::Train;

  const Goal &goal_of(const Dialog &d) const;

  friend bool operator==(const Corpus &, const Corpus &) = default;
};

// Structural invariants of one dialog (alternation, termination marker,
// placeholder grammar, non-negative kb counts). Empty when valid.
std::vector<std::string> dialog_violations(const Dialog &dialog);

// Goal invariants: 1-2 segments, distinct domains in a 2-segment goal.
std::vector<std::string> goal_violations(const Goal &goal);

// Corpus invariants: dialog and goal checks, unique dialog ids, resolvable
// goal references (when goals are present). Throws SchemaError.
void validate_corpus(const Corpus &corpus);

// One JSON object per line; blank lines and lines starting with '#' are
// skipped. Throws SchemaError with line/field diagnostics.
Corpus load_corpus(const std::filesystem::path &corpus_file,
                   const std::optional<std::filesystem::path> &goals_file = std::nullopt);
void save_corpus(const Corpus &corpus, const std::filesystem::path &corpus_file,
                 const std::optional<std::filesystem::path> &goals_file = std::nullopt,
                 const std::string &header_comment = "");

// Goal file: JSON object goal_id -> goal. A directory resolves to goals.json.
std::map<std::string, Goal> load_goals(const std::filesystem::path &path);
void save_goals(const std::map<std::string, Goal> &goals, const std::filesystem::path &path);

// Dialog <-> single-line JSON text (exposed for the remote trace log and tests).
std::string dialog_to_json_line(const Dialog &dialog);
Dialog dialog_from_json_line(const std::string &line, std::size_t line_no = 0);
std::string goal_to_json_line(const Goal &goal);

}  // namespace dialoforge

#endif  // DIALOFORGE_CORPUS_HPP_
