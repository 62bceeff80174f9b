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

#include "dialoforge/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dialoforge/errors.hpp"

namespace dialoforge {

std::size_t NGramModel::KeyHash::operator()(const std::vector<int> &key) const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int v : key) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h);
}

NGramModel::NGramModel(int order, double k) : order_(order), k_(k) {
  if (order < 2) throw InvalidArgument("n-gram order must be >= 2");
  if (!(k > 0.0)) throw InvalidArgument("add-k constant must be positive");
  tables_.resize(static_cast<std::size_t>(order));
}

int NGramModel::intern(const std::string &token) {
  auto [it, inserted] = ids_.emplace(token, static_cast<int>(vocab_.size()));
  if (inserted) {
    vocab_.push_back(token);
    is_target_.push_back(false);
  }
  return it->second;
}

void NGramModel::mark_target(int id) {
  auto i = static_cast<std::size_t>(id);
  if (!is_target_[i]) {
    is_target_[i] = true;
    ++target_count_;
  }
}

int NGramModel::token_id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? -1 : it->second;
}

std::vector<int> NGramModel::encode(const std::vector<std::string> &tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto &t : tokens) out.push_back(token_id(t));
  return out;
}

void NGramModel::fit(const std::vector<NGramExample> &examples) {
  if (tables_.empty()) tables_.resize(static_cast<std::size_t>(order_));
  const std::size_t max_ctx = static_cast<std::size_t>(order_ - 1);
  for (const NGramExample &ex : examples) {
    std::vector<int> seq;
    seq.reserve(ex.prefix.size() + ex.target.size() + 1);
    for (const auto &t : ex.prefix) seq.push_back(intern(t));
    const std::size_t first_target = seq.size();
    for (const auto &t : ex.target) seq.push_back(intern(t));
    seq.push_back(intern(std::string(kEndOfSequence)));
    for (std::size_t pos = first_target; pos < seq.size(); ++pos) {
      const int next = seq[pos];
      mark_target(next);
      const std::size_t avail = std::min(pos, max_ctx);
      for (std::size_t len = 0; len <= avail; ++len) {
        std::vector<int> key(seq.begin() + static_cast<std::ptrdiff_t>(pos - len),
                             seq.begin() + static_cast<std::ptrdiff_t>(pos));
        ContextStats &stats = tables_[len][key];
        ++stats.total;
        ++stats.next[next];
      }
    }
  }
}

const NGramModel::ContextStats *NGramModel::find_context(std::span<const int> history,
                                                         int length) const {
  if (length > static_cast<int>(history.size())) return nullptr;
  auto tail = history.subspan(history.size() - static_cast<std::size_t>(length));
  if (std::any_of(tail.begin(), tail.end(), [](int id) { return id < 0; })) return nullptr;
  const Table &table = tables_[static_cast<std::size_t>(length)];
  auto it = table.find(std::vector<int>(tail.begin(), tail.end()));
  if (it == table.end() || it->second.total == 0) return nullptr;
  return &it->second;
}

int NGramModel::context_length_used(std::span<const int> history) const {
  int max_len = std::min<int>(order_ - 1, static_cast<int>(history.size()));
  for (int len = max_len; len >= 0; --len) {
    if (find_context(history, len)) return len;
  }
  return -1;
}

std::vector<double> NGramModel::distribution(std::span<const int> history) const {
  if (target_count_ == 0 || tables_.empty() || tables_[0].empty()) {
    throw DegenerateModel("n-gram model has no training data");
  }
  const int len = context_length_used(history);
  const ContextStats &stats = *find_context(history, len);
  const double v = static_cast<double>(target_count_);
  const double denom = static_cast<double>(stats.total) + k_ * v;
  std::vector<double> dist(vocab_.size(), 0.0);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (is_target_[i]) dist[i] = k_ / denom;
  }
  for (const auto &[id, count] : stats.next) {
    dist[static_cast<std::size_t>(id)] = (static_cast<double>(count) + k_) / denom;
  }
  return dist;
}

double NGramModel::probability(std::span<const int> history, int token) const {
  if (token < 0 || token >= static_cast<int>(vocab_.size())) return 0.0;
  return distribution(history)[static_cast<std::size_t>(token)];
}

std::vector<double> NGramModel::distribution(const std::vector<std::string> &history) const {
  std::vector<int> ids = encode(history);
  return distribution(std::span<const int>(ids));
}

double NGramModel::probability(const std::vector<std::string> &history,
                               std::string_view token) const {
  std::vector<int> ids = encode(history);
  return probability(std::span<const int>(ids), token_id(token));
}

double NGramModel::perplexity(const std::vector<NGramExample> &examples) const {
  double log_sum = 0.0;
  std::size_t n = 0;
  for (const NGramExample &ex : examples) {
    std::vector<std::string> seq = ex.prefix;
    std::vector<std::string> target = ex.target;
    target.emplace_back(kEndOfSequence);
    std::vector<int> ids = encode(seq);
    for (const auto &t : target) {
      double p = probability(std::span<const int>(ids), token_id(t));
      // Tokens outside the target vocabulary get the unigram smoothing floor.
      if (p <= 0.0) {
        const double n0 = static_cast<double>(tables_[0].begin()->second.total);
        p = k_ / (n0 + k_ * static_cast<double>(target_count_));
      }
      log_sum += std::log(p);
      ++n;
      ids.push_back(token_id(t));
    }
  }
  return n == 0 ? 1.0 : std::exp(-log_sum / static_cast<double>(n));
}

nlohmann::json NGramModel::to_json() const {
  nlohmann::json contexts = nlohmann::json::array();
  for (std::size_t len = 0; len < tables_.size(); ++len) {
    std::vector<std::pair<std::vector<int>, const ContextStats *>> rows;
    for (const auto &[key, stats] : tables_[len]) rows.emplace_back(key, &stats);
    std::sort(rows.begin(), rows.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    for (const auto &[key, stats] : rows) {
      nlohmann::json next = nlohmann::json::array();
      for (const auto &[id, count] : stats->next) next.push_back({id, count});
      contexts.push_back({key, stats->total, std::move(next)});
    }
  }
  std::vector<int> targets;
  for (std::size_t i = 0; i < is_target_.size(); ++i) {
    if (is_target_[i]) targets.push_back(static_cast<int>(i));
  }
  return {{"order", order_},  {"k", k_},
          {"vocab", vocab_},  {"targets", targets},
          {"contexts", std::move(contexts)}};
}

NGramModel NGramModel::from_json(const nlohmann::json &j) {
  try {
    NGramModel m(j.at("order").get<int>(), j.at("k").get<double>());
    for (const auto &t : j.at("vocab")) m.intern(t.get<std::string>());
    for (const auto &t : j.at("targets")) {
      int id = t.get<int>();
      if (id < 0 || static_cast<std::size_t>(id) >= m.vocab_.size()) throw SchemaError("n-gram target id out of range");
      m.mark_target(id);
    }
    for (const auto &row : j.at("contexts")) {
      std::vector<int> key = row.at(0).get<std::vector<int>>();
      if (key.size() >= m.tables_.size()) throw SchemaError("n-gram context longer than order");
      ContextStats &stats = m.tables_[key.size()][key];
      stats.total = row.at(1).get<long>();
      for (const auto &nc : row.at(2)) stats.next[nc.at(0).get<int>()] = nc.at(1).get<long>();
    }
    return m;
  } catch (const nlohmann::json::exception &e) {
    throw SchemaError(std::string("malformed n-gram model: ") + e.what());
  }
}

bool operator==(const NGramModel &a, const NGramModel &b) {
  return a.order_ == b.order_ && a.k_ == b.k_ && a.vocab_ == b.vocab_ &&
         a.is_target_ == b.is_target_ && a.tables_ == b.tables_;
}

// ---------------------------------------------------------------------------

Nucleus compute_nucleus(std::span<const double> dist, double p) {
  if (dist.empty()) throw InvalidDistribution("empty distribution");
  double total = 0.0;
  for (double x : dist) {
    if (!std::isfinite(x) || x < 0.0) throw InvalidDistribution("negative or non-finite probability");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidDistribution("distribution sums to " + std::to_string(total));
  }
  std::vector<std::size_t> order;
  order.reserve(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] > 0.0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
  Nucleus n;
  for (std::size_t idx : order) {
    n.indices.push_back(idx);
    n.mass += dist[idx];
    if (n.mass >= p - 1e-12) break;
  }
  n.probs.reserve(n.indices.size());
  for (std::size_t idx : n.indices) n.probs.push_back(dist[idx] / n.mass);
  return n;
}

std::size_t sample_from_nucleus(const Nucleus &nucleus, Rng &rng) {
  double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i < nucleus.indices.size(); ++i) {
    cum += nucleus.probs[i];
    if (u < cum) return nucleus.indices[i];
  }
  return nucleus.indices.back();
}

std::size_t nucleus_sample(std::span<const double> dist, double p, Rng &rng) {
  return sample_from_nucleus(compute_nucleus(dist, p), rng);
}

}  // namespace dialoforge
