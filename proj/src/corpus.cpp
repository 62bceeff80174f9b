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

#include "dialoforge/corpus.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dialoforge/errors.hpp"
#include "dialoforge/text.hpp"

namespace dialoforge {

using nlohmann::json;

std::optional<std::string> GoalSegment::primary_value(const std::string &slot) const {
  if (auto it = booking.find(slot); it != booking.end()) return it->second;
  if (auto it = constraints.find(slot); it != constraints.end()) return it->second;
  return std::nullopt;
}

bool Turn::is_end_of_dialogue() const {
  return speaker == Speaker::User && trim(text) == kEndOfDialogue;
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Valid: return "valid";
    case Split::Test: return "test";
  }
  return "train";
}

const Goal &Corpus::goal_of(const Dialog &d) const {
  auto it = goals.find(d.goal_id);
  if (it == goals.end()) {
    throw SchemaError("dialog " + d.dialog_id + " references unknown goal '" + d.goal_id + "'");
  }
  return it->second;
}

std::vector<std::string> dialog_violations(const Dialog &dialog) {
  std::vector<std::string> out;
  const auto &turns = dialog.turns;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    const Turn &t = turns[i];
    const Speaker expected = i % 2 == 0 ? Speaker::User : Speaker::Agent;
    std::string at = "turn " + std::to_string(i);
    if (t.speaker != expected) out.push_back(at + ": breaks user/agent alternation");
    if (t.is_end_of_dialogue()) {
      if (i + 1 != turns.size()) out.push_back(at + ": end-of-dialogue marker before the last turn");
      if (!dialog.terminated) out.push_back(at + ": end-of-dialogue marker in an unterminated dialog");
    } else if (trim(t.text).empty()) {
      out.push_back(at + ": empty utterance");
    }
    for (const std::string &ph : find_placeholders(t.text)) {
      if (!is_valid_placeholder(ph)) out.push_back(at + ": malformed placeholder " + ph);
    }
    if (t.annotation) {
      if (t.speaker != Speaker::Agent) out.push_back(at + ": annotation on a user turn");
      if (t.annotation->kb_count < 0) out.push_back(at + ": negative kb_count");
    }
  }
  if (dialog.terminated && (turns.empty() || !turns.back().is_end_of_dialogue())) {
    out.push_back("terminated dialog does not end with " + std::string(kEndOfDialogue));
  }
  return out;
}

std::vector<std::string> goal_violations(const Goal &goal) {
  std::vector<std::string> out;
  if (goal.segments.empty() || goal.segments.size() > 2) {
    out.push_back("goal " + goal.goal_id + " has " + std::to_string(goal.segments.size()) +
                  " segments (expected 1 or 2)");
  }
  if (goal.segments.size() == 2 && goal.segments[0].domain == goal.segments[1].domain) {
    out.push_back("goal " + goal.goal_id + " repeats domain " +
                  std::string(domain_name(goal.segments[0].domain)));
  }
  for (const GoalSegment &s : goal.segments) {
    if (s.fallback && !s.primary_value(s.fallback->first)) {
      out.push_back("goal " + goal.goal_id + ": fallback slot '" + s.fallback->first +
                    "' is neither a constraint nor a booking slot");
    }
  }
  return out;
}

void validate_corpus(const Corpus &corpus) {
  std::set<std::string> ids;
  for (const Dialog &d : corpus.dialogs) {
    if (!ids.insert(d.dialog_id).second) throw SchemaError("duplicate dialog id " + d.dialog_id);
    auto problems = dialog_violations(d);
    if (!problems.empty()) throw SchemaError("dialog " + d.dialog_id + ": " + problems.front());
    if (!corpus.goals.empty()) corpus.goal_of(d);
  }
  for (const auto &[id, goal] : corpus.goals) {
    auto problems = goal_violations(goal);
    if (!problems.empty()) throw SchemaError(problems.front());
  }
}

// ---------------------------------------------------------------------------
// JSON encoding

namespace {

json booking_to_json(const BookingResult &b) {
  json j = {{"success", b.success}};
  if (b.reference) j["reference"] = *b.reference;
  if (b.fee) j["fee"] = *b.fee;
  return j;
}

json turn_to_json(const Turn &t) {
  json j = {{"speaker", speaker_name(t.speaker)}, {"text", t.text}};
  if (t.annotation) {
    j["belief_state"] = serialize_belief(t.annotation->belief);
    j["kb_count"] = t.annotation->kb_count;
    if (t.annotation->booking) j["booking"] = booking_to_json(*t.annotation->booking);
  }
  return j;
}

json dialog_to_json(const Dialog &d) {
  json turns = json::array();
  for (const Turn &t : d.turns) turns.push_back(turn_to_json(t));
  return {{"dialog_id", d.dialog_id},
          {"goal_id", d.goal_id},
          {"turns", std::move(turns)},
          {"terminated", d.terminated},
          {"source", d.source == Provenance::Human ? "human" : "generated"}};
}

json segment_to_json(const GoalSegment &s) {
  json j = {{"domain", domain_name(s.domain)},
            {"constraints", s.constraints},
            {"requestables", s.requestables},
            {"booking", s.booking}};
  if (s.fallback) j["fallback"] = {{"slot", s.fallback->first}, {"value", s.fallback->second}};
  return j;
}

// Field accessors that report the JSON path on failure.
class Reader {
 public:
  Reader(std::string where) : where_(std::move(where)) {}

  [[noreturn]] void fail(const std::string &field, const std::string &msg) const {
    throw SchemaError(where_ + ": field '" + field + "': " + msg);
  }

  const json &require(const json &obj, const std::string &field, const std::string &path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(field);
    if (it == obj.end()) fail(path.empty() ? field : path + "." + field, "missing");
    return *it;
  }

  std::string string_at(const json &obj, const std::string &field, const std::string &path) const {
    const json &v = require(obj, field, path);
    if (!v.is_string()) fail(path.empty() ? field : path + "." + field, "expected a string");
    return v.get<std::string>();
  }

  std::map<std::string, std::string> string_map(const json &v, const std::string &path) const {
    std::map<std::string, std::string> out;
    if (v.is_null()) return out;
    if (!v.is_object()) fail(path, "expected an object");
    for (const auto &[k, val] : v.items()) {
      if (!val.is_string()) fail(path + "." + k, "expected a string");
      out[k] = val.get<std::string>();
    }
    return out;
  }

 private:
  std::string where_;
};

Turn turn_from_json(const json &j, const Reader &r, const std::string &path) {
  Turn t;
  t.speaker = speaker_from_string(r.string_at(j, "speaker", path));
  t.text = r.string_at(j, "text", path);
  if (j.contains("belief_state")) {
    AgentAnnotation a;
    std::string belief = r.string_at(j, "belief_state", path);
    try {
      a.belief = parse_belief(belief);
    } catch (const Error &e) {
      r.fail(path + ".belief_state", e.what());
    }
    if (j.contains("kb_count")) {
      const json &kc = j.at("kb_count");
      if (!kc.is_number_integer()) r.fail(path + ".kb_count", "expected an integer");
      a.kb_count = kc.get<int>();
      if (a.kb_count < 0) r.fail(path + ".kb_count", "must be non-negative");
    }
    if (j.contains("booking")) {
      const json &b = j.at("booking");
      if (!b.is_object() || !b.contains("success") || !b.at("success").is_boolean()) {
        r.fail(path + ".booking", "expected {success: bool, reference?, fee?}");
      }
      BookingResult br;
      br.success = b.at("success").get<bool>();
      if (b.contains("reference")) br.reference = r.string_at(b, "reference", path + ".booking");
      if (b.contains("fee")) br.fee = r.string_at(b, "fee", path + ".booking");
      a.booking = br;
    }
    t.annotation = std::move(a);
  } else if (j.contains("kb_count")) {
    r.fail(path + ".kb_count", "kb_count without belief_state");
  }
  return t;
}

Dialog dialog_from_json(const json &j, const Reader &r) {
  if (!j.is_object()) r.fail("", "expected a dialog object");
  Dialog d;
  d.dialog_id = r.string_at(j, "dialog_id", "");
  d.goal_id = r.string_at(j, "goal_id", "");
  const json &turns = r.require(j, "turns", "");
  if (!turns.is_array()) r.fail("turns", "expected an array");
  for (std::size_t i = 0; i < turns.size(); ++i) {
    d.turns.push_back(turn_from_json(turns[i], r, "turns[" + std::to_string(i) + "]"));
  }
  const json &term = r.require(j, "terminated", "");
  if (!term.is_boolean()) r.fail("terminated", "expected a boolean");
  d.terminated = term.get<bool>();
  if (j.contains("source")) {
    std::string src = r.string_at(j, "source", "");
    if (src == "human") {
      d.source = Provenance::Human;
    } else if (src == "generated") {
      d.source = Provenance::Generated;
    } else {
      r.fail("source", "expected 'human' or 'generated'");
    }
  }
  auto problems = dialog_violations(d);
  if (!problems.empty()) r.fail("turns", problems.front());
  return d;
}

GoalSegment segment_from_json(const json &j, const Reader &r, const std::string &path) {
  GoalSegment s;
  try {
    s.domain = domain_from_string(r.string_at(j, "domain", path));
  } catch (const UnknownDomain &e) {
    r.fail(path + ".domain", e.what());
  }
  if (j.contains("constraints")) s.constraints = r.string_map(j.at("constraints"), path + ".constraints");
  if (j.contains("booking")) s.booking = r.string_map(j.at("booking"), path + ".booking");
  if (j.contains("requestables")) {
    const json &req = j.at("requestables");
    if (!req.is_array()) r.fail(path + ".requestables", "expected an array");
    for (const auto &v : req) {
      if (!v.is_string()) r.fail(path + ".requestables", "expected strings");
      s.requestables.insert(v.get<std::string>());
    }
  }
  if (j.contains("fallback") && !j.at("fallback").is_null()) {
    const json &fb = j.at("fallback");
    s.fallback = std::make_pair(r.string_at(fb, "slot", path + ".fallback"),
                                r.string_at(fb, "value", path + ".fallback"));
  }
  return s;
}

}  // namespace

std::string dialog_to_json_line(const Dialog &dialog) { return dialog_to_json(dialog).dump(); }

std::string goal_to_json_line(const Goal &goal) {
  json segs = json::array();
  for (const GoalSegment &s : goal.segments) segs.push_back(segment_to_json(s));
  return json{{"goal_id", goal.goal_id}, {"segments", std::move(segs)}}.dump();
}

Dialog dialog_from_json_line(const std::string &line, std::size_t line_no) {
  Reader r("line " + std::to_string(line_no));
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception &e) {
    r.fail("", e.what());
  }
  return dialog_from_json(j, r);
}

Corpus load_corpus(const std::filesystem::path &corpus_file,
                   const std::optional<std::filesystem::path> &goals_file) {
  std::ifstream in(corpus_file);
  if (!in) throw SchemaError("cannot open corpus file " + corpus_file.string());
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      if (auto pos = t.find("split="); pos != std::string::npos) {
        std::string s = t.substr(pos + 6, t.find(' ', pos) - pos - 6);
        if (s == "valid") corpus.split = Split::Valid;
        if (s == "test") corpus.split = Split::Test;
      }
      continue;
    }
    corpus.dialogs.push_back(dialog_from_json_line(t, line_no));
  }
  if (goals_file) corpus.goals = load_goals(*goals_file);
  validate_corpus(corpus);
  return corpus;
}

void save_corpus(const Corpus &corpus, const std::filesystem::path &corpus_file,
                 const std::optional<std::filesystem::path> &goals_file,
                 const std::string &header_comment) {
  if (corpus_file.has_parent_path()) std::filesystem::create_directories(corpus_file.parent_path());
  std::ofstream out(corpus_file);
  if (!out) throw SchemaError("cannot write " + corpus_file.string());
  out << "# dialoforge corpus split=" << split_name(corpus.split);
  if (!header_comment.empty()) out << " " << header_comment;
  out << "\n";
  for (const Dialog &d : corpus.dialogs) out << dialog_to_json_line(d) << "\n";
  if (goals_file) save_goals(corpus.goals, *goals_file);
}

std::map<std::string, Goal> load_goals(const std::filesystem::path &path) {
  std::filesystem::path file = std::filesystem::is_directory(path) ? path / "goals.json" : path;
  std::ifstream in(file);
  if (!in) throw SchemaError("cannot open goal file " + file.string());
  Reader r(file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception &e) {
    r.fail("", e.what());
  }
  if (!j.is_object()) r.fail("", "expected an object goal_id -> goal");
  std::map<std::string, Goal> goals;
  for (const auto &[id, g] : j.items()) {
    Goal goal;
    goal.goal_id = id;
    const json &segs = r.require(g, "segments", id);
    if (!segs.is_array()) r.fail(id + ".segments", "expected an array");
    for (std::size_t i = 0; i < segs.size(); ++i) {
      goal.segments.push_back(segment_from_json(segs[i], r, id + ".segments[" + std::to_string(i) + "]"));
    }
    auto problems = goal_violations(goal);
    if (!problems.empty()) r.fail(id, problems.front());
    goals.emplace(id, std::move(goal));
  }
  return goals;
}

void save_goals(const std::map<std::string, Goal> &goals, const std::filesystem::path &path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  json j = json::object();
  for (const auto &[id, goal] : goals) {
    json segs = json::array();
    for (const GoalSegment &s : goal.segments) segs.push_back(segment_to_json(s));
    j[id] = {{"segments", std::move(segs)}};
  }
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write " + path.string());
  out << j.dump(1) << "\n";
}

}  // namespace dialoforge
