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

#include "dialoforge/selector.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "dialoforge/errors.hpp"
#include "dialoforge/text.hpp"

namespace dialoforge {

using nlohmann::json;

const std::array<std::string_view, kFeatureCount> &feature_names() {
  static constexpr std::array<std::string_view, kFeatureCount> kNames = {
      "length", "overlap", "repeat", "coverage", "unresolved", "novelty"};
  return kNames;
}

ScoringContext scoring_context(Role role, Domain domain, const std::vector<Turn> &history,
                               const ValueRecord &grounding) {
  ScoringContext ctx;
  ctx.grounding = grounding;
  ctx.turns.reserve(history.size());
  for (const Turn &t : history) {
    if (role == Role::UserResponse && t.speaker == Speaker::User) {
      ctx.turns.push_back(delexicalize(t.text, grounding, domain));
    } else {
      ctx.turns.push_back(t.text);
    }
  }
  return ctx;
}

std::string scoring_view(Role role, Domain domain, std::string_view candidate,
                         const ValueRecord &grounding) {
  if (role == Role::UserResponse) return delexicalize(candidate, grounding, domain);
  return std::string(candidate);
}

namespace {

bool is_content(const std::string &tok) {
  static const std::set<std::string> kStop = {
      "a",   "an",  "the", "i",    "you", "is",   "are", "to",    "of",   "for", "in",
      "on",  "at",  "and", "it",   "that", "be",  "do",  "would", "can",  "will", "me",
      "my",  "we",  "there", "have", "need", "want", "please", "yes", "no", "ok"};
  if (is_placeholder(tok)) return true;
  if (tok.size() == 1 && !std::isalnum(static_cast<unsigned char>(tok[0]))) return false;
  return !kStop.contains(tok);
}

std::set<std::pair<std::string, std::string>> bigrams(const std::vector<std::string> &toks) {
  std::set<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) out.emplace(toks[i], toks[i + 1]);
  return out;
}

bool resolvable(const std::string &placeholder, const ValueRecord &grounding) {
  std::string slot = slot_for_placeholder(placeholder);
  return grounding.contains(slot) || (slot == "people" && grounding.contains("count"));
}

}  // namespace

Features extract_features(const ScoringContext &ctx, std::string_view candidate) {
  Features f{};
  const std::vector<std::string> cand = tokenize(candidate);
  std::vector<std::vector<std::string>> turns;
  turns.reserve(ctx.turns.size());
  for (const std::string &t : ctx.turns) turns.push_back(tokenize(t));

  f[0] = static_cast<double>(cand.size()) / 10.0;

  if (!turns.empty()) {
    std::set<std::string> last;
    for (const auto &t : turns.back()) {
      if (is_content(t)) last.insert(t);
    }
    std::size_t content = 0;
    std::size_t shared = 0;
    for (const auto &t : cand) {
      if (!is_content(t)) continue;
      ++content;
      if (last.contains(t)) ++shared;
    }
    f[1] = content == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(content);
  }

  f[2] = std::any_of(turns.begin(), turns.end(), [&](const auto &t) { return t == cand; }) ? 1.0 : 0.0;

  std::set<std::string> seen_placeholders;
  std::string context_text;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    for (const auto &t : turns[i]) {
      if (is_placeholder(t)) seen_placeholders.insert(t);
    }
    context_text += " " + to_lower(ctx.turns[i]) + " ";
  }
  std::set<std::string> new_info;
  double unresolved = 0.0;
  for (const auto &t : cand) {
    if (!is_placeholder(t)) continue;
    if (!resolvable(t, ctx.grounding)) {
      unresolved += 1.0;
      continue;
    }
    if (seen_placeholders.contains(t)) continue;
    std::string slot = slot_for_placeholder(t);
    auto it = ctx.grounding.find(slot);
    if (it == ctx.grounding.end()) it = ctx.grounding.find("count");
    const std::string value = " " + to_lower(it->second) + " ";
    if (context_text.find(value) == std::string::npos) new_info.insert(t);
  }
  f[3] = static_cast<double>(new_info.size());
  f[4] = unresolved;

  const auto cb = bigrams(cand);
  if (!cb.empty()) {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto &t : turns) {
      auto b = bigrams(t);
      seen.insert(b.begin(), b.end());
    }
    std::size_t fresh = 0;
    for (const auto &b : cb) {
      if (!seen.contains(b)) ++fresh;
    }
    f[5] = static_cast<double>(fresh) / static_cast<double>(cb.size());
  }
  return f;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double triplet_loss(double s_p, double s_n, double alpha) { return std::max(0.0, s_n - s_p + alpha); }

double FeatureScorer::score_features(const Features &f) const {
  double z = bias_;
  for (std::size_t i = 0; i < kFeatureCount; ++i) z += weights_[i] * f[i];
  return sigmoid(z);
}

double FeatureScorer::score(const ScoringContext &ctx, std::string_view candidate) const {
  return score_features(extract_features(ctx, candidate));
}

json FeatureScorer::to_json() const {
  json w = json::object();
  for (std::size_t i = 0; i < kFeatureCount; ++i) w[std::string(feature_names()[i])] = weights_[i];
  return {{"weights", std::move(w)}, {"bias", bias_}};
}

FeatureScorer FeatureScorer::from_json(const json &j) {
  FeatureScorer s;
  try {
    const json &w = j.at("weights");
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      s.weights_[i] = w.at(std::string(feature_names()[i])).get<double>();
    }
    s.bias_ = j.at("bias").get<double>();
  } catch (const json::exception &e) {
    throw SchemaError(std::string("malformed scorer: ") + e.what());
  }
  return s;
}

std::vector<std::string> NegativeSet::all() const {
  std::vector<std::string> out = random;
  out.insert(out.end(), context.begin(), context.end());
  out.insert(out.end(), concatenated.begin(), concatenated.end());
  return out;
}

NegativeSet sample_negatives(const std::vector<std::string> &responses,
                             const std::vector<std::string> &context, std::string_view positive,
                             Rng &rng) {
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    if (responses[i] != positive) usable.push_back(i);
  }
  if (usable.size() < 2) {
    throw InsufficientCorpus("need at least 2 responses other than the positive, have " +
                             std::to_string(usable.size()));
  }
  auto draw = [&]() -> const std::string & { return responses[usable[rng.below(usable.size())]]; };

  NegativeSet out;
  std::vector<std::size_t> ctx;
  for (std::size_t i = 0; i < context.size(); ++i) {
    if (context[i] != positive) ctx.push_back(i);
  }
  // Two distinct context utterances without replacement.
  for (int k = 0; k < 2 && !ctx.empty(); ++k) {
    std::size_t pick = rng.below(ctx.size());
    out.context.push_back(context[ctx[pick]]);
    ctx.erase(ctx.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  out.substituted = out.context.size() < 2;
  while (out.context.size() < 2) out.context.push_back(draw());
  for (int k = 0; k < 5; ++k) out.random.push_back(draw());
  for (int k = 0; k < 3; ++k) {
    const std::string &a = draw();
    const std::string &b = draw();
    out.concatenated.push_back(a + " " + b);
  }
  return out;
}

double mean_triplet_loss(const FeatureScorer &scorer, const std::vector<TripletGroup> &groups,
                         double alpha) {
  double total = 0.0;
  std::size_t n = 0;
  for (const TripletGroup &g : groups) {
    const double sp = scorer.score_features(g.positive);
    for (const Features &neg : g.negatives) {
      total += triplet_loss(sp, scorer.score_features(neg), alpha);
      ++n;
    }
  }
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}

double positive_wins_rate(const FeatureScorer &scorer, const std::vector<TripletGroup> &groups) {
  if (groups.empty()) return 0.0;
  std::size_t wins = 0;
  for (const TripletGroup &g : groups) {
    const double sp = scorer.score_features(g.positive);
    bool all = std::all_of(g.negatives.begin(), g.negatives.end(),
                           [&](const Features &n) { return sp > scorer.score_features(n); });
    if (all) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(groups.size());
}

TrainReport train_on_triplets(FeatureScorer &scorer, const std::vector<TripletGroup> &groups,
                              const ScorerTrainConfig &cfg) {
  TrainReport report;
  for (const TripletGroup &g : groups) report.pairs += g.negatives.size();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Features grad{};
    double grad_b = 0.0;
    double loss = 0.0;
    for (const TripletGroup &g : groups) {
      const double sp = scorer.score_features(g.positive);
      const double dp = sp * (1.0 - sp);
      for (const Features &neg : g.negatives) {
        const double sn = scorer.score_features(neg);
        const double l = triplet_loss(sp, sn, cfg.alpha);
        loss += l;
        if (l <= 0.0) continue;
        const double dn = sn * (1.0 - sn);
        for (std::size_t i = 0; i < kFeatureCount; ++i) grad[i] += dn * neg[i] - dp * g.positive[i];
        grad_b += dn - dp;
      }
    }
    const double n = report.pairs == 0 ? 1.0 : static_cast<double>(report.pairs);
    report.loss_history.push_back(loss / n);
    for (std::size_t i = 0; i < kFeatureCount; ++i) scorer.weights()[i] -= cfg.lr * grad[i] / n;
    scorer.bias() -= cfg.lr * grad_b / n;
  }
  report.loss_history.push_back(mean_triplet_loss(scorer, groups, cfg.alpha));
  return report;
}

std::vector<TripletGroup> corpus_triplets(const Corpus &corpus, const KnowledgeBase &kb, Role role,
                                          Domain domain, std::uint64_t seed) {
  struct Item {
    ScoringContext ctx;
    std::string positive;
  };
  std::vector<Item> items;
  std::vector<std::string> responses;
  const Speaker speaker = role == Role::UserResponse ? Speaker::User : Speaker::Agent;
  for (const Dialog &dlg : corpus.dialogs) {
    auto git = corpus.goals.find(dlg.goal_id);
    if (git == corpus.goals.end() || git->second.segments.size() != 1) continue;
    const GoalSegment &seg = git->second.segments[0];
    if (seg.domain != domain) continue;
    const ValueRecord goal_record = goal_grounding(seg);
    for (std::size_t i = 0; i < dlg.turns.size(); ++i) {
      const Turn &t = dlg.turns[i];
      if (t.speaker != speaker) continue;
      std::vector<Turn> history(dlg.turns.begin(), dlg.turns.begin() + static_cast<std::ptrdiff_t>(i));
      ValueRecord grounding = goal_record;
      if (role == Role::AgentResponse) {
        if (!t.annotation || !kb.has_domain(domain)) continue;
        const AgentAnnotation &a = *t.annotation;
        BookingStatus status =
            a.booking && !a.booking->success ? BookingStatus::Failed : BookingStatus::None;
        grounding = agent_grounding(a.belief, summarize(kb, a.belief, status));
      }
      std::string view = scoring_view(role, domain, t.text, grounding);
      responses.push_back(view);
      items.push_back({scoring_context(role, domain, history, grounding), std::move(view)});
    }
  }
  std::vector<TripletGroup> groups;
  groups.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    Rng rng(derive_seed(seed, i));
    NegativeSet negs = sample_negatives(responses, items[i].ctx.turns, items[i].positive, rng);
    TripletGroup g;
    g.positive = extract_features(items[i].ctx, items[i].positive);
    for (const std::string &n : negs.all()) g.negatives.push_back(extract_features(items[i].ctx, n));
    groups.push_back(std::move(g));
  }
  return groups;
}

FeatureScorer train_scorer(const Corpus &corpus, const KnowledgeBase &kb, Role role, Domain domain,
                           const ScorerTrainConfig &cfg, std::uint64_t seed, TrainReport *report) {
  std::vector<TripletGroup> groups = corpus_triplets(corpus, kb, role, domain, seed);
  if (groups.empty()) {
    throw EmptyCorpus("no " + std::string(role_name(role)) + " turns for domain " +
                      std::string(domain_name(domain)));
  }
  FeatureScorer scorer;
  TrainReport r = train_on_triplets(scorer, groups, cfg);
  if (report) *report = std::move(r);
  return scorer;
}

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  const double m = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - m);
    total += out[i];
  }
  for (double &p : out) p /= total;
  return out;
}

std::size_t select_index(std::span<const double> probs, SelectionMode mode, Rng &rng) {
  if (probs.empty()) throw EmptyPool("cannot select from an empty pool");
  if (mode == SelectionMode::Argmax) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
      if (probs[i] > probs[best]) best = i;
    }
    return best;
  }
  const double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return i;
  }
  return probs.size() - 1;
}

std::pair<ScoredPool, std::size_t> score_and_select(const Scorer &scorer, const ScoringContext &ctx,
                                                    const std::vector<std::string> &pool,
                                                    SelectionMode mode, Rng &rng) {
  if (pool.empty()) throw EmptyPool("cannot select from an empty pool");
  ScoredPool scored;
  scored.candidates = pool;
  scored.scores.reserve(pool.size());
  for (const std::string &c : pool) scored.scores.push_back(scorer.score(ctx, c));
  scored.probs = softmax(scored.scores);
  // Argmax over raw scores: softmax is monotone, and exact score ties stay
  // ties instead of depending on rounding in exp().
  std::size_t chosen = mode == SelectionMode::Argmax
                           ? select_index(std::span<const double>(scored.scores), mode, rng)
                           : select_index(std::span<const double>(scored.probs), mode, rng);
  return {std::move(scored), chosen};
}

}  // namespace dialoforge
