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

#ifndef DIALOFORGE_NGRAM_BACKEND_HPP_
#define DIALOFORGE_NGRAM_BACKEND_HPP_

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dialoforge/corpus.hpp"
#include "dialoforge/generation.hpp"
#include "dialoforge/goals.hpp"
#include "dialoforge/kb.hpp"
#include "dialoforge/ngram.hpp"
#include "dialoforge/tagger.hpp"

namespace dialoforge {

struct NGramBackendConfig {
  int order = 4;
  double k = NGramModel::kDefaultK;
  int history_budget = 512;  // prefix tokens kept, oldest history turns dropped first
};

// Token prefix for a conditioning: sections in the order goal, history,
// belief, kb summary, last user utterance, then a role marker that also
// carries the KB bucket for the agent. Values in user text are replaced by
// tagger placeholders.
std::vector<std::string> conditioning_tokens(const Conditioning &cond, const ValueTagger &tagger,
                                             int history_budget);

// kb_none / kb_one / kb_few / kb_many / book_fail / book_ok
std::string kb_bucket(const KbSummary &kb);

// Built-in backend: per-domain user and agent n-gram models plus the value
// tagger for belief tracking. User candidates come back relexicalized from
// the conditioning's grounding; agent candidates stay delexicalized.
// Placeholders the grounding cannot resolve are never sampled.
class NGramBackend : public GenerationBackend {
 public:
  NGramBackend() = default;

  // Single-goal dialogs only. Throws EmptyCorpus when no domain has data.
  static NGramBackend train(const Corpus &corpus, const KnowledgeBase &kb,
                            const GoalTemplates &templates, const NGramBackendConfig &cfg = {});

  std::vector<std::string> generate(const Conditioning &cond,
                                    const SamplingConfig &cfg) const override;
  std::string belief(const Conditioning &cond) const override;

  bool has_domain(Domain d) const { return models_.contains(d); }
  std::vector<Domain> domains() const;
  const ValueTagger &tagger() const { return tagger_; }
  const NGramModel &model(Domain d, Role role) const;
  const NGramBackendConfig &config() const { return cfg_; }

  nlohmann::json to_json() const;
  static NGramBackend from_json(const nlohmann::json &j);

 private:
  struct DomainModels {
    NGramModel user;
    NGramModel agent;
  };

  std::map<Domain, DomainModels> models_;
  ValueTagger tagger_;
  NGramBackendConfig cfg_;
};

// Training pairs the backend derives from a corpus (exposed for tests).
struct RoleExamples {
  std::vector<NGramExample> user;
  std::vector<NGramExample> agent;
};
std::map<Domain, RoleExamples> backend_examples(const Corpus &corpus, const KnowledgeBase &kb,
                                                const GoalTemplates &templates,
                                                const ValueTagger &tagger, int history_budget);

}  // namespace dialoforge

#endif  // DIALOFORGE_NGRAM_BACKEND_HPP_
