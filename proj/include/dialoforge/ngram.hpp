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

#ifndef DIALOFORGE_NGRAM_HPP_
#define DIALOFORGE_NGRAM_HPP_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "dialoforge/rng.hpp"

namespace dialoforge {

// Boundary marker appended after every target sequence.
inline constexpr std::string_view kEndOfSequence = "</s>";

// One training example: conditioning prefix and the target tokens the model
// learns to predict (the end-of-sequence marker is appended implicitly).
struct NGramExample {
  std::vector<std::string> prefix;
  std::vector<std::string> target;
};

// Conditional n-gram model p(target_j | previous order-1 tokens) where the
// context window may reach back into the conditioning prefix. Add-k smoothing
// at the longest context seen in training, backing off to shorter contexts
// (down to the unigram) when a context was never observed. The support of
// every distribution is the target vocabulary: tokens seen only in prefixes
// get ids (so they can form contexts) but zero probability.
class NGramModel {
 public:
  static constexpr double kDefaultK = 0.01;

  NGramModel() = default;
  explicit NGramModel(int order, double k = kDefaultK);

  // Accumulates counts; may be called repeatedly before use.
  void fit(const std::vector<NGramExample> &examples);

  int order() const { return order_; }
  double k() const { return k_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  std::size_t target_vocab_size() const { return target_count_; }
  bool is_target(int id) const {
    return id >= 0 && static_cast<std::size_t>(id) < is_target_.size() && is_target_[static_cast<std::size_t>(id)];
  }
  const std::vector<std::string> &vocabulary() const { return vocab_; }
  // -1 when unknown.
  int token_id(std::string_view token) const;
  const std::string &token(int id) const { return vocab_.at(static_cast<std::size_t>(id)); }

  // Full next-token distribution (indexed by token id) after `history`.
  std::vector<double> distribution(std::span<const int> history) const;
  double probability(std::span<const int> history, int token) const;
  // Convenience overloads on strings; unknown history tokens are kept as
  // out-of-vocabulary ids, which simply shortens the usable context.
  std::vector<double> distribution(const std::vector<std::string> &history) const;
  double probability(const std::vector<std::string> &history, std::string_view token) const;

  // Length of the context actually used for `history` after backoff.
  int context_length_used(std::span<const int> history) const;

  std::vector<int> encode(const std::vector<std::string> &tokens) const;

  // Per-token perplexity of the targets (incl. end marker) of `examples`.
  double perplexity(const std::vector<NGramExample> &examples) const;

  nlohmann::json to_json() const;
  static NGramModel from_json(const nlohmann::json &j);

  friend bool operator==(const NGramModel &a, const NGramModel &b);

 private:
  struct ContextStats {
    long total = 0;
    std::map<int, long> next;

    friend bool operator==(const ContextStats &, const ContextStats &) = default;
  };
  struct KeyHash {
    std::size_t operator()(const std::vector<int> &key) const;
  };
  using Table = std::unordered_map<std::vector<int>, ContextStats, KeyHash>;

  int intern(const std::string &token);
  void mark_target(int id);
  const ContextStats *find_context(std::span<const int> history, int length) const;

  int order_ = 3;
  double k_ = kDefaultK;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> ids_;
  std::vector<bool> is_target_;
  std::size_t target_count_ = 0;
  // tables_[L] holds contexts of length L (0 = unigram).
  std::vector<Table> tables_;
};

// Top-p truncation of a distribution: indices in descending probability order
// (ties by index) forming the smallest prefix with mass >= p, and their
// renormalized probabilities.
struct Nucleus {
  std::vector<std::size_t> indices;
  std::vector<double> probs;
  double mass = 0.0;  // pre-normalization mass of the nucleus
};

// Throws InvalidDistribution unless dist is finite, non-negative and sums to
// 1 within 1e-9. p <= 0 degenerates to the arg-max token.
Nucleus compute_nucleus(std::span<const double> dist, double p);
std::size_t sample_from_nucleus(const Nucleus &nucleus, Rng &rng);
std::size_t nucleus_sample(std::span<const double> dist, double p, Rng &rng);

}  // namespace dialoforge

#endif  // DIALOFORGE_NGRAM_HPP_
