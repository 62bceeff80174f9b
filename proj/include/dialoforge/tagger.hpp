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

#ifndef DIALOFORGE_TAGGER_HPP_
#define DIALOFORGE_TAGGER_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dialoforge/belief.hpp"
#include "dialoforge/corpus.hpp"
#include "dialoforge/domain.hpp"
#include "dialoforge/kb.hpp"
#include "dialoforge/ngram.hpp"

namespace dialoforge {

// A value mention in a token sequence: tokens [begin, end) spell `value`,
// assigned to `slot`.
struct ValueSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string value;
  std::string slot;

  friend bool operator==(const ValueSpan &, const ValueSpan &) = default;
};

// Finds slot values in user utterances. Candidate values come from a
// per-domain lexicon (KB attributes and annotated belief values) plus two
// shape classes (clock times, integers). When a value fits several slots
// (cambridge as departure or destination), a small n-gram over the
// surrounding words picks the slot, trained on annotated dialogs.
class ValueTagger {
 public:
  static constexpr std::string_view kNoSlot = "none";

  ValueTagger() = default;

  static ValueTagger build(const KnowledgeBase &kb, const Corpus &corpus);

  bool has_domain(Domain d) const { return domains_.contains(d); }

  std::vector<ValueSpan> tag(Domain d, const std::vector<std::string> &tokens) const;

  // Tokens with every tagged span replaced by its [value_<slot>] placeholder.
  std::vector<std::string> delexicalize(Domain d, const std::vector<std::string> &tokens) const;

  // The previous state with every value mentioned in `user_text` written in.
  BeliefState track(const BeliefState &previous, std::string_view user_text) const;

  nlohmann::json to_json() const;
  static ValueTagger from_json(const nlohmann::json &j);

 private:
  struct DomainLexicon {
    // phrase tokens -> slot -> surface value as stored in the KB
    std::map<std::vector<std::string>, std::map<std::string, std::string>> phrases;
    std::size_t longest = 1;
    std::set<std::string> clock_slots;
    std::set<std::string> number_slots;
    NGramModel chooser{5};
  };

  struct Mention {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::map<std::string, std::string> options;  // slot -> value
  };

  static std::vector<Mention> mentions(const DomainLexicon &lex,
                                       const std::vector<std::string> &tokens);
  static std::vector<std::string> chooser_prefix(const std::vector<std::string> &tokens,
                                                 const Mention &m);
  static std::string choose(const DomainLexicon &lex, const std::vector<std::string> &tokens,
                            const Mention &m);

  std::map<Domain, DomainLexicon> domains_;
};

}  // namespace dialoforge

#endif  // DIALOFORGE_TAGGER_HPP_
