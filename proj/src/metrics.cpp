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

#include "dialoforge/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <omp.h>

#include "dialoforge/delex.hpp"
#include "dialoforge/errors.hpp"
#include "dialoforge/text.hpp"

namespace dialoforge {

BleuStats &BleuStats::operator+=(const BleuStats &o) {
  for (int n = 0; n < kBleuOrder; ++n) {
    matches[n] += o.matches[n];
    totals[n] += o.totals[n];
  }
  candidate_length += o.candidate_length;
  reference_length += o.reference_length;
  return *this;
}

namespace {

std::map<std::vector<std::string>, std::uint64_t> ngram_counts(const std::vector<std::string> &toks, int n) {
  std::map<std::vector<std::string>, std::uint64_t> out;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= toks.size(); ++i) {
    ++out[std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                   toks.begin() + static_cast<std::ptrdiff_t>(i) + n)];
  }
  return out;
}

void check_aligned(std::size_t a, std::size_t b) {
  if (a != b) {
    throw LengthMismatch(std::to_string(a) + " candidates against " + std::to_string(b) + " references");
  }
}

}  // namespace

BleuStats sentence_bleu_stats(const std::vector<std::string> &candidate,
                              const std::vector<std::string> &reference) {
  BleuStats s;
  s.candidate_length = candidate.size();
  s.reference_length = reference.size();
  for (int n = 1; n <= kBleuOrder; ++n) {
    auto cand = ngram_counts(candidate, n);
    auto ref = ngram_counts(reference, n);
    for (const auto &[gram, c] : cand) {
      s.totals[n - 1] += c;
      if (auto it = ref.find(gram); it != ref.end()) s.matches[n - 1] += std::min(c, it->second);
    }
  }
  return s;
}

BleuStats corpus_bleu_stats_serial(const std::vector<std::string> &candidates,
                                   const std::vector<std::string> &references) {
  check_aligned(candidates.size(), references.size());
  BleuStats total;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    total += sentence_bleu_stats(tokenize(candidates[i]), tokenize(references[i]));
  }
  return total;
}

BleuStats corpus_bleu_stats(const std::vector<std::string> &candidates,
                            const std::vector<std::string> &references, int workers) {
  check_aligned(candidates.size(), references.size());
  const int n = static_cast<int>(candidates.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  BleuStats total;
#pragma omp parallel num_threads(threads)
  {
    BleuStats local;
#pragma omp for schedule(static)
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      local += sentence_bleu_stats(tokenize(candidates[k]), tokenize(references[k]));
    }
#pragma omp critical
    total += local;
  }
  return total;
}

double bleu_from_stats(const BleuStats &s) {
  if (s.candidate_length == 0 || s.matches[0] == 0) return 0.0;
  double log_p = 0.0;
  for (int n = 0; n < kBleuOrder; ++n) {
    double m = static_cast<double>(s.matches[n]);
    double t = static_cast<double>(s.totals[n]);
    if (s.matches[n] == 0) {
      m += 1.0;
      t += 1.0;
    }
    log_p += std::log(m / t) / kBleuOrder;
  }
  const double c = static_cast<double>(s.candidate_length);
  const double r = static_cast<double>(s.reference_length);
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return 100.0 * bp * std::exp(log_p);
}

double corpus_bleu(const std::vector<std::string> &candidates,
                   const std::vector<std::string> &references, int workers) {
  return bleu_from_stats(corpus_bleu_stats(candidates, references, workers));
}

double combined(double bleu, double inform, double success) { return bleu + 0.5 * (inform + success); }

std::vector<SegmentOutcome> inform_success(const Dialog &dialog, const Goal &goal, const KnowledgeBase &kb) {
  std::vector<SegmentOutcome> out;
  for (const Turn &t : dialog.turns) {
    if (t.speaker == Speaker::Agent && !t.annotation) {
      throw MissingBelief("dialog " + dialog.dialog_id + " has an agent turn without a belief state");
    }
  }
  for (const GoalSegment &seg : goal.segments) {
    SegmentOutcome o;
    o.domain = seg.domain;
    const std::string prefix = "[" + std::string(domain_name(seg.domain)) + "_";
    const AgentAnnotation *final_state = nullptr;
    bool offered = false;
    std::set<std::string> given;
    for (const Turn &t : dialog.turns) {
      if (!t.annotation || t.annotation->belief.domain() != seg.domain) continue;
      final_state = &*t.annotation;
      for (const std::string &ph : find_placeholders(t.text)) {
        given.insert(ph);
        if (t.annotation->kb_count > 0 && ph.starts_with(prefix)) offered = true;
      }
    }
    if (final_state && offered && kb.has_domain(seg.domain)) {
      EntitySet hits = query(kb, final_state->belief);
      if (!hits.empty()) {
        const Entity &top = hits.front();
        o.inform = true;
        for (const auto &[slot, wanted] : seg.constraints) {
          if (!kb.slots(seg.domain).is_attribute(slot)) continue;
          auto it = top.find(slot);
          if (it == top.end() || !slot_matches(slot, it->second, wanted)) o.inform = false;
        }
      }
    }
    if (o.inform) {
      o.success = true;
      for (const std::string &r : seg.requestables) {
        if (!given.contains(placeholder_for(seg.domain, r))) o.success = false;
      }
    }
    out.push_back(o);
  }
  return out;
}

EvalReport evaluate(const Corpus &generated, const Corpus &reference,
                    const std::map<std::string, Goal> &goals, const KnowledgeBase &kb, int workers) {
  std::map<std::string, const Dialog *> refs;
  for (const Dialog &d : reference.dialogs) refs[d.dialog_id] = &d;
  std::vector<std::string> cands, golds;
  EvalReport r;
  int informed = 0, succeeded = 0;
  for (const Dialog &d : generated.dialogs) {
    auto rit = refs.find(d.dialog_id);
    if (rit == refs.end()) throw LengthMismatch("dialog " + d.dialog_id + " has no reference");
    std::vector<std::string> a, b;
    for (const Turn &t : d.turns) {
      if (t.speaker == Speaker::Agent) a.push_back(t.text);
    }
    for (const Turn &t : rit->second->turns) {
      if (t.speaker == Speaker::Agent) b.push_back(t.text);
    }
    if (a.size() != b.size()) {
      throw LengthMismatch("dialog " + d.dialog_id + ": " + std::to_string(a.size()) + " agent turns against " +
                           std::to_string(b.size()) + " in the reference");
    }
    cands.insert(cands.end(), a.begin(), a.end());
    golds.insert(golds.end(), b.begin(), b.end());

    auto git = goals.find(d.goal_id);
    if (git == goals.end()) throw SchemaError("dialog " + d.dialog_id + " references unknown goal " + d.goal_id);
    bool all_inform = true, all_success = true;
    for (const SegmentOutcome &o : inform_success(d, git->second, kb)) {
      DomainBreakdown &b = r.per_domain[o.domain];
      ++b.segments;
      b.inform += o.inform;
      b.success += o.success;
      all_inform = all_inform && o.inform;
      all_success = all_success && o.success;
    }
    informed += all_inform;
    succeeded += all_success;
  }
  r.dialogs = generated.dialogs.size();
  r.turns = cands.size();
  r.bleu = corpus_bleu(cands, golds, workers);
  if (r.dialogs > 0) {
    r.inform = 100.0 * informed / static_cast<double>(r.dialogs);
    r.success = 100.0 * succeeded / static_cast<double>(r.dialogs);
  }
  r.combined = combined(r.bleu, r.inform, r.success);
  return r;
}

std::string format_report(const EvalReport &r, std::uint64_t seed) {
  std::ostringstream out;
  char line[160];
  out << "# dialoforge evaluation seed=" << seed << "\n";
  out << "# bleu=corpus BLEU-4, uniform weights, brevity penalty, add-one smoothing on orders 2-4 with zero "
         "matches\n";
  out << "# inform/success=% of dialogs whose every goal segment informs/succeeds\n";
  out << "dialogs\t" << r.dialogs << "\n";
  out << "agent_turns\t" << r.turns << "\n";
  out << "BLEU\tInform\tSuccess\tCombined\n";
  std::snprintf(line, sizeof line, "%.2f\t%.2f\t%.2f\t%.2f\n", r.bleu, r.inform, r.success, r.combined);
  out << line;
  out << "domain\tsegments\tinform\tsuccess\n";
  for (const auto &[d, b] : r.per_domain) {
    const double n = b.segments > 0 ? b.segments : 1;
    std::snprintf(line, sizeof line, "%s\t%d\t%.2f\t%.2f\n", std::string(domain_name(d)).c_str(), b.segments,
                  100.0 * b.inform / n, 100.0 * b.success / n);
    out << line;
  }
  return out.str();
}

}  // namespace dialoforge
