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

#ifndef DIALOFORGE_MODELS_HPP_
#define DIALOFORGE_MODELS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>

#include "dialoforge/ngram_backend.hpp"
#include "dialoforge/selector.hpp"
#include "dialoforge/simulator.hpp"

namespace dialoforge {

struct ModelTrainConfig {
  NGramBackendConfig ngram;
  ScorerTrainConfig scorer;
  std::uint64_t seed = 0;
  int workers = 0;  // scorer fan-out; 1 runs serially, <= 0 uses the OpenMP default
};

// Everything `train` produces: the n-gram backend plus one feature scorer per
// (domain, role). Domains whose corpus cannot support a scorer share the mean
// of the trained weights.
struct ModelSet {
  NGramBackend backend;
  std::map<Domain, FeatureScorer> user_scorers;
  std::map<Domain, FeatureScorer> agent_scorers;
  FeatureScorer fallback_user;
  FeatureScorer fallback_agent;

  // Throws EmptyCorpus.
  static ModelSet train(const Corpus &corpus, const KnowledgeBase &kb, const GoalTemplates &templates,
                        const ModelTrainConfig &cfg = {});

  // Views that borrow from this set; it must outlive them. `generator`
  // replaces the built-in backend (for example with a remote one).
  BotBundle user_bundle(const GenerationBackend *generator = nullptr,
                        const Scorer *scorer = nullptr) const;
  BotBundle agent_bundle(const GenerationBackend *generator = nullptr,
                         const Scorer *scorer = nullptr) const;

  // dir/backend.json and dir/scorers.json. Throws SchemaError on load.
  void save(const std::filesystem::path &dir) const;
  static ModelSet load(const std::filesystem::path &dir);
};

}  // namespace dialoforge

#endif  // DIALOFORGE_MODELS_HPP_
