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

#ifndef DIALOFORGE_PIPELINE_HPP_
#define DIALOFORGE_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dialoforge/corpus.hpp"
#include "dialoforge/goals.hpp"
#include "dialoforge/kb.hpp"
#include "dialoforge/models.hpp"
#include "dialoforge/simulator.hpp"

namespace dialoforge {

// Stratified by domain over the single-goal dialogs: round-half-up of
// x * stratum size from each stratum, original order kept. Throws
// InvalidArgument (x outside (0, 1]) and EmptyStratum.
Corpus subsample(const Corpus &corpus, double fraction, std::uint64_t seed);

struct AugmentConfig {
  int retry_budget = 3;  // extra attempts per dialog after the first
  bool strict = false;   // throw RetryBudgetExhausted instead of coming up short
  int workers = 0;
  std::uint64_t seed = 0;
  ModelTrainConfig train;
  SimulationConfig simulation;
};

struct AugmentResult {
  Corpus corpus;  // seeds, then simulated single-goal, then composed multi-goal
  std::size_t seeds = 0;
  std::size_t singles = 0;
  std::size_t multis = 0;
  std::size_t shortfall = 0;
  std::vector<std::string> warnings;
};

// N seeds + N simulated single-goal dialogs (one per seed goal) + 2N
// two-domain dialogs, each the concatenation of two fresh simulations.
// A dialog counts when it terminated and passes every invariant; failures
// are re-simulated under new seeds up to the retry budget. `generator`
// replaces the trained n-gram backend when set. Throws EmptyCorpus,
// InvalidArgument (fewer than two domains), RetryBudgetExhausted (strict).
AugmentResult augment(const Corpus &seed_corpus, const KnowledgeBase &kb, const GoalTemplates &templates,
                      const AugmentConfig &cfg, const GenerationBackend *generator = nullptr);

enum class ExportStyle { Lexicalized, Delexicalized };

// dir/turns.tsv (one row per turn with a provenance column), plus
// dir/corpus.jsonl and dir/goals.json. Lexicalized export fills agent
// placeholders from the KB entity behind each recorded belief.
void export_training_set(const Corpus &corpus, const KnowledgeBase &kb, ExportStyle style,
                         const std::filesystem::path &dir);
// Reads turns.tsv back. Throws SchemaError.
Corpus load_training_tsv(const std::filesystem::path &file);

}  // namespace dialoforge

#endif  // DIALOFORGE_PIPELINE_HPP_
