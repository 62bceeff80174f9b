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

#ifndef DIALOFORGE_METRICS_HPP_
#define DIALOFORGE_METRICS_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dialoforge/corpus.hpp"
#include "dialoforge/kb.hpp"

namespace dialoforge {

inline constexpr int kBleuOrder = 4;

// Clipped n-gram matches and candidate n-gram totals per order, plus the
// lengths the brevity penalty needs. Additive across sentence pairs.
struct BleuStats {
  std::array<std::uint64_t, kBleuOrder> matches{};
  std::array<std::uint64_t, kBleuOrder> totals{};
  std::uint64_t candidate_length = 0;
  std::uint64_t reference_length = 0;

  BleuStats &operator+=(const BleuStats &o);
  friend bool operator==(const BleuStats &, const BleuStats &) = default;
};

BleuStats sentence_bleu_stats(const std::vector<std::string> &candidate,
                              const std::vector<std::string> &reference);

// Corpus statistics over aligned pairs. Throws LengthMismatch.
// `workers` <= 0 uses the OpenMP default.
BleuStats corpus_bleu_stats(const std::vector<std::string> &candidates,
                            const std::vector<std::string> &references, int workers = 0);
BleuStats corpus_bleu_stats_serial(const std::vector<std::string> &candidates,
                                   const std::vector<std::string> &references);

// BLEU-4 on a 0-100 scale: uniform weights, brevity penalty, and add-one
// smoothing for orders 2-4 that have no match (a unigram miss stays zero).
double bleu_from_stats(const BleuStats &stats);
double corpus_bleu(const std::vector<std::string> &candidates,
                   const std::vector<std::string> &references, int workers = 0);

struct SegmentOutcome {
  Domain domain = Domain::Restaurant;
  bool inform = false;
  bool success = false;  // implies inform
};

// Per goal segment. A segment informs when the agent offered an entity of
// its domain (a [<domain>_...] placeholder on a turn with results) and the
// top entity of the segment's final belief query meets every goal
// constraint. It succeeds when it informs and every requestable's
// placeholder was given. Throws MissingBelief on unannotated agent turns.
std::vector<SegmentOutcome> inform_success(const Dialog &dialog, const Goal &goal,
                                           const KnowledgeBase &kb);

// bleu + 0.5 (inform + success), all on a 0-100 scale.
double combined(double bleu, double inform, double success);

struct DomainBreakdown {
  int segments = 0;
  int inform = 0;
  int success = 0;
};

struct EvalReport {
  double bleu = 0.0;
  double inform = 0.0;   // % of dialogs whose every segment informs
  double success = 0.0;  // % of dialogs whose every segment succeeds
  double combined = 0.0;
  std::size_t dialogs = 0;
  std::size_t turns = 0;  // aligned agent turns behind the BLEU figure
  std::map<Domain, DomainBreakdown> per_domain;
};

// Generated dialogs are aligned with the reference by dialog id; BLEU
// compares agent turns position by position. Throws LengthMismatch,
// MissingBelief, SchemaError (unknown goal).
EvalReport evaluate(const Corpus &generated, const Corpus &reference,
                    const std::map<std::string, Goal> &goals, const KnowledgeBase &kb, int workers = 0);

// Tab-separated summary row plus a per-domain breakdown.
std::string format_report(const EvalReport &report, std::uint64_t seed);

}  // namespace dialoforge

#endif  // DIALOFORGE_METRICS_HPP_
