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

#ifndef DIALOFORGE_SELECTOR_HPP_
#define DIALOFORGE_SELECTOR_HPP_

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dialoforge/corpus.hpp"
#include "dialoforge/delex.hpp"
#include "dialoforge/generation.hpp"
#include "dialoforge/kb.hpp"
#include "dialoforge/rng.hpp"

namespace dialoforge {

inline constexpr double kTripletMargin = 0.05;
inline constexpr std::size_t kFeatureCount = 6;

using Features = std::array<double, kFeatureCount>;

// length, overlap, repeat, coverage, unresolved, novelty
const std::array<std::string_view, kFeatureCount> &feature_names();

// What a scorer sees: the preceding turns (user turns delexicalized against
// the goal on the user side, raw on the agent side) and the grounding record
// that decides which placeholders are resolvable.
struct ScoringContext {
  std::vector<std::string> turns;
  ValueRecord grounding;
};

ScoringContext scoring_context(Role role, Domain domain, const std::vector<Turn> &history,
                               const ValueRecord &grounding);

// Candidate in the form the scorer compares (user text delexicalized).
std::string scoring_view(Role role, Domain domain, std::string_view candidate,
                         const ValueRecord &grounding);

Features extract_features(const ScoringContext &ctx, std::string_view candidate);

double sigmoid(double x);

// max(0, s_n - s_p + alpha)
double triplet_loss(double s_p, double s_n, double alpha = kTripletMargin);

class Scorer {
 public:
  virtual ~Scorer() = default;
  // A value in (0, 1).
  virtual double score(const ScoringContext &ctx, std::string_view candidate) const = 0;
};

class FeatureScorer : public Scorer {
 public:
  FeatureScorer() = default;
  FeatureScorer(Features weights, double bias) : weights_(weights), bias_(bias) {}

  double score(const ScoringContext &ctx, std::string_view candidate) const override;
  double score_features(const Features &f) const;

  const Features &weights() const { return weights_; }
  double bias() const { return bias_; }
  Features &weights() { return weights_; }
  double &bias() { return bias_; }

  nlohmann::json to_json() const;
  static FeatureScorer from_json(const nlohmann::json &j);

  friend bool operator==(const FeatureScorer &a, const FeatureScorer &b) {
    return a.weights_ == b.weights_ && a.bias_ == b.bias_;
  }

 private:
  Features weights_{};
  double bias_ = 0.0;
};

struct NegativeSet {
  std::vector<std::string> random;
  std::vector<std::string> context;
  std::vector<std::string> concatenated;
  bool substituted = false;  // context slots refilled with random responses

  std::vector<std::string> all() const;
};

// 5 random responses, 2 context utterances, 3 concatenations of two random
// responses; none equal to the positive. With fewer than 2 usable context
// utterances the missing slots become random responses (flagged). Throws
// InsufficientCorpus when fewer than 2 responses differ from the positive.
NegativeSet sample_negatives(const std::vector<std::string> &responses,
                             const std::vector<std::string> &context, std::string_view positive,
                             Rng &rng);

// One positive against its negatives, as feature vectors.
struct TripletGroup {
  Features positive{};
  std::vector<Features> negatives;
};

struct ScorerTrainConfig {
  int epochs = 200;
  double lr = 0.05;
  double alpha = kTripletMargin;
};

struct TrainReport {
  std::vector<double> loss_history;  // mean loss before each epoch, then the final loss
  std::size_t pairs = 0;

  double initial_loss() const { return loss_history.empty() ? 0.0 : loss_history.front(); }
  double final_loss() const { return loss_history.empty() ? 0.0 : loss_history.back(); }
};

double mean_triplet_loss(const FeatureScorer &scorer, const std::vector<TripletGroup> &groups,
                         double alpha = kTripletMargin);
// Fraction of groups whose positive outscores every negative.
double positive_wins_rate(const FeatureScorer &scorer, const std::vector<TripletGroup> &groups);

// Full-batch gradient descent on the mean triplet loss.
TrainReport train_on_triplets(FeatureScorer &scorer, const std::vector<TripletGroup> &groups,
                              const ScorerTrainConfig &cfg);

// Triplet groups from every turn of `role` in the domain's single-goal dialogs.
std::vector<TripletGroup> corpus_triplets(const Corpus &corpus, const KnowledgeBase &kb, Role role,
                                          Domain domain, std::uint64_t seed);

// Throws EmptyCorpus when the domain has no turns of that role.
FeatureScorer train_scorer(const Corpus &corpus, const KnowledgeBase &kb, Role role, Domain domain,
                           const ScorerTrainConfig &cfg, std::uint64_t seed,
                           TrainReport *report = nullptr);

std::vector<double> softmax(std::span<const double> scores);

struct ScoredPool {
  std::vector<std::string> candidates;
  std::vector<double> scores;
  std::vector<double> probs;
};

enum class SelectionMode { Argmax, Sample };

// Argmax breaks ties by the lowest index. Throws EmptyPool.
std::pair<ScoredPool, std::size_t> score_and_select(const Scorer &scorer, const ScoringContext &ctx,
                                                    const std::vector<std::string> &pool,
                                                    SelectionMode mode, Rng &rng);
// Selection over precomputed scores (used by remote scorers and tests).
std::size_t select_index(std::span<const double> probs, SelectionMode mode, Rng &rng);

}  // namespace dialoforge

#endif  // DIALOFORGE_SELECTOR_HPP_
