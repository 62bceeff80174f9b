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

#ifndef DIALOFORGE_REMOTE_HPP_
#define DIALOFORGE_REMOTE_HPP_

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dialoforge/generation.hpp"
#include "dialoforge/selector.hpp"

namespace dialoforge {

inline constexpr const char *kBackendUrlEnv = "DIALOFORGE_BACKEND_URL";
inline constexpr const char *kBackendTimeoutEnv = "DIALOFORGE_BACKEND_TIMEOUT_MS";

struct RemoteConfig {
  std::string url;  // http://host:port[/prefix]
  int timeout_ms = 10000;
  int retries = 2;  // extra attempts on connection failure or 503

  // Reads the two environment variables; explicit arguments win. Returns
  // nullopt when no URL is configured anywhere. Throws InvalidArgument on a
  // malformed timeout.
  static std::optional<RemoteConfig> resolve(const std::optional<std::string> &url = std::nullopt,
                                             const std::optional<int> &timeout_ms = std::nullopt);
};

// Request bodies of the wire protocol (exposed for the conformance suite).
nlohmann::json generate_request(const Conditioning &cond, const SamplingConfig &cfg);
nlohmann::json belief_request(const Conditioning &cond);
nlohmann::json score_request(const ScoringContext &ctx, std::string_view candidate);
// Inverse of score_request's context encoding.
ScoringContext scoring_context_from_json(const nlohmann::json &j);

// POSTs a JSON body and returns the parsed reply. Safe to call from many
// threads at once: every call opens its own connection. Throws
// BackendUnavailable (unreachable, timed out, non-2xx after retries) and
// SchemaError (reply is not JSON).
nlohmann::json post_json(const RemoteConfig &cfg, const std::string &path, const nlohmann::json &body);

class RemoteBackend : public GenerationBackend {
 public:
  explicit RemoteBackend(RemoteConfig cfg) : cfg_(std::move(cfg)) {}

  std::vector<std::string> generate(const Conditioning &cond, const SamplingConfig &cfg) const override;
  std::string belief(const Conditioning &cond) const override;

 private:
  RemoteConfig cfg_;
};

class RemoteScorer : public Scorer {
 public:
  explicit RemoteScorer(RemoteConfig cfg) : cfg_(std::move(cfg)) {}

  // Throws SchemaError when the reply's score is not in (0, 1).
  double score(const ScoringContext &ctx, std::string_view candidate) const override;

 private:
  RemoteConfig cfg_;
};

struct ConformanceCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// The serve-check suite: response schemas, pool_size honoring, determinism
// under a fixed seed, belief parseability, score range, rejection of
// malformed bodies and concurrent requests. Never throws for server faults;
// each one becomes a failed check.
std::vector<ConformanceCheck> serve_check(const RemoteConfig &cfg);

}  // namespace dialoforge

#endif  // DIALOFORGE_REMOTE_HPP_
