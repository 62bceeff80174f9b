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

#ifndef DIALOFORGE_BELIEF_HPP_
#define DIALOFORGE_BELIEF_HPP_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dialoforge/domain.hpp"

namespace dialoforge {

// Executable query: a domain plus slot=value constraints. Pairs are kept in
// canonical order (slots sorted lexicographically, unique).
class BeliefState {
 public:
  using Pair = std::pair<std::string, std::string>;

  explicit BeliefState(Domain domain = Domain::Restaurant) : domain_(domain) {}
  BeliefState(Domain domain, std::vector<Pair> pairs);

  Domain domain() const { return domain_; }
  const std::vector<Pair> &pairs() const { return pairs_; }
  bool empty() const { return pairs_.empty(); }
  std::size_t size() const { return pairs_.size(); }

  std::optional<std::string> get(std::string_view slot) const;
  bool has(std::string_view slot) const { return get(slot).has_value(); }
  // Inserts or overwrites.
  void set(std::string slot, std::string value);
  void erase(std::string_view slot);

  std::map<std::string, std::string> as_map() const;

  friend bool operator==(const BeliefState &, const BeliefState &) = default;

 private:
  Domain domain_;
  std::vector<Pair> pairs_;
};

// Grammar: domain (';' slot '=' value)*. Duplicate slots: last wins.
// Throws ParseError or UnknownDomain.
BeliefState parse_belief(std::string_view text);

// Canonical wire form, e.g. "train ; arrive_by = 11:45 ; day = saturday".
std::string serialize_belief(const BeliefState &state);

// Drops incomplete "slot =" / "slot" fragments from a generated belief string
// and re-parses. Throws UnparseableBelief when no domain token can be read.
BeliefState repair_belief(std::string_view text);

struct BeliefDiff {
  std::map<std::string, std::string> added;
  std::map<std::string, std::string> removed;
  std::map<std::string, std::pair<std::string, std::string>> changed;

  bool empty() const { return added.empty() && removed.empty() && changed.empty(); }
};

// Throws DomainMismatch.
BeliefDiff diff_belief(const BeliefState &from, const BeliefState &to);

}  // namespace dialoforge

#endif  // DIALOFORGE_BELIEF_HPP_
