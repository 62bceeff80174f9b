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

#include "dialoforge/remote.hpp"

#include <chrono>
#include <cstdlib>
#include <future>
#include <thread>

#include <httplib.h>

#include "dialoforge/belief.hpp"
#include "dialoforge/errors.hpp"
#include "dialoforge/text.hpp"

namespace dialoforge {

using nlohmann::json;

std::optional<RemoteConfig> RemoteConfig::resolve(const std::optional<std::string> &url,
                                                  const std::optional<int> &timeout_ms) {
  RemoteConfig cfg;
  if (url && !url->empty()) {
    cfg.url = *url;
  } else if (const char *env = std::getenv(kBackendUrlEnv); env && *env) {
    cfg.url = env;
  } else {
    return std::nullopt;
  }
  if (timeout_ms) {
    cfg.timeout_ms = *timeout_ms;
  } else if (const char *env = std::getenv(kBackendTimeoutEnv); env && *env) {
    char *end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v <= 0) {
      throw InvalidArgument(std::string(kBackendTimeoutEnv) + " must be a positive integer, got '" + env + "'");
    }
    cfg.timeout_ms = static_cast<int>(v);
  }
  if (cfg.timeout_ms <= 0) throw InvalidArgument("backend timeout must be positive");
  return cfg;
}

json generate_request(const Conditioning &cond, const SamplingConfig &cfg) {
  json j = conditioning_to_json(cond);
  j["pool_size"] = cfg.pool_size;
  j["nucleus_p"] = cfg.nucleus_p;
  j["max_tokens"] = cfg.max_tokens;
  j["seed"] = cfg.seed;
  return j;
}

json belief_request(const Conditioning &cond) { return conditioning_to_json(cond); }

json score_request(const ScoringContext &ctx, std::string_view candidate) {
  std::string context;
  for (const std::string &t : ctx.turns) {
    if (!context.empty()) context += "\n";
    context += t;
  }
  std::string grounding;
  for (const auto &[k, v] : ctx.grounding) {
    if (!grounding.empty()) grounding += " ; ";
    grounding += k + " = " + v;
  }
  return {{"context", context}, {"candidate", std::string(candidate)}, {"grounding", grounding}};
}

ScoringContext scoring_context_from_json(const json &j) {
  ScoringContext ctx;
  try {
    const std::string context = j.at("context").get<std::string>();
    if (!context.empty()) ctx.turns = split(context, '\n');
    if (j.contains("grounding")) {
      for (const std::string &pair : split(j["grounding"].get<std::string>(), ';')) {
        if (trim(pair).empty()) continue;
        auto eq = pair.find('=');
        if (eq == std::string::npos) throw SchemaError("grounding pair without '=': " + pair);
        ctx.grounding[trim(pair.substr(0, eq))] = trim(pair.substr(eq + 1));
      }
    }
  } catch (const json::exception &e) {
    throw SchemaError(std::string("malformed score request: ") + e.what());
  }
  return ctx;
}

namespace {

struct Endpoint {
  std::string origin;  // scheme://host:port
  std::string prefix;  // path prefix without trailing slash
};

Endpoint parse_url(const std::string &url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos || url.substr(0, scheme) != "http") {
    throw InvalidArgument("backend URL must start with http://, got '" + url + "'");
  }
  const auto slash = url.find('/', scheme + 3);
  Endpoint e{url.substr(0, slash), slash == std::string::npos ? "" : url.substr(slash)};
  while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  return e;
}

}  // namespace

json post_json(const RemoteConfig &cfg, const std::string &path, const json &body) {
  const Endpoint ep = parse_url(cfg.url);
  const std::string payload = body.dump();
  std::string last_error;
  for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
    httplib::Client client(ep.origin);
    const auto timeout = std::chrono::milliseconds(cfg.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(ep.prefix + path, payload, "application/json");
    if (!res) {
      last_error = "POST " + path + " failed: " + httplib::to_string(res.error());
    } else if (res->status == 503) {
      last_error = "POST " + path + " returned 503";
      int wait_ms = 100 * (attempt + 1);
      if (res->has_header("Retry-After")) {
        wait_ms = std::max(wait_ms, 1000 * std::atoi(res->get_header_value("Retry-After").c_str()));
      }
      if (attempt < cfg.retries) std::this_thread::sleep_for(std::chrono::milliseconds(std::min(wait_ms, cfg.timeout_ms)));
      continue;
    } else if (res->status < 200 || res->status >= 300) {
      throw BackendUnavailable("POST " + path + " returned " + std::to_string(res->status) + ": " + res->body);
    } else {
      try {
        return json::parse(res->body);
      } catch (const json::exception &e) {
        throw SchemaError("POST " + path + " replied with invalid JSON: " + e.what());
      }
    }
  }
  throw BackendUnavailable(last_error + " (after " + std::to_string(cfg.retries + 1) + " attempts)");
}

std::vector<std::string> RemoteBackend::generate(const Conditioning &cond, const SamplingConfig &cfg) const {
  const json reply = post_json(cfg_, "/generate", generate_request(cond, cfg));
  try {
    return reply.at("candidates").get<std::vector<std::string>>();
  } catch (const json::exception &e) {
    throw SchemaError(std::string("/generate reply lacks a candidate list: ") + e.what());
  }
}

std::string RemoteBackend::belief(const Conditioning &cond) const {
  const json reply = post_json(cfg_, "/belief", belief_request(cond));
  try {
    return reply.at("belief_state").get<std::string>();
  } catch (const json::exception &e) {
    throw SchemaError(std::string("/belief reply lacks belief_state: ") + e.what());
  }
}

double RemoteScorer::score(const ScoringContext &ctx, std::string_view candidate) const {
  const json reply = post_json(cfg_, "/score", score_request(ctx, candidate));
  double s = 0.0;
  try {
    s = reply.at("score").get<double>();
  } catch (const json::exception &e) {
    throw SchemaError(std::string("/score reply lacks a numeric score: ") + e.what());
  }
  if (!(s > 0.0 && s < 1.0)) throw SchemaError("/score returned " + std::to_string(s) + ", outside (0, 1)");
  return s;
}

namespace {

Conditioning probe_user() {
  Conditioning c;
  c.role = Role::UserResponse;
  c.domain = Domain::Restaurant;
  c.goal_text = "You are looking for a restaurant. The restaurant should serve indian food. "
                "The restaurant should be in the cheap price range.";
  c.grounding = {{"food", "indian"}, {"pricerange", "cheap"}};
  return c;
}

Conditioning probe_agent() {
  Conditioning c;
  c.role = Role::AgentResponse;
  c.domain = Domain::Restaurant;
  c.history = {Turn{Speaker::User, "i am looking for a cheap indian restaurant .", std::nullopt}};
  c.last_user = "in the north please .";
  c.belief = "restaurant ; area = north ; food = indian ; pricerange = cheap";
  KbSummary kb;
  kb.count = 1;
  kb.top = {{"name", "royal spice"}, {"area", "north"}, {"food", "indian"}, {"pricerange", "cheap"}};
  c.kb_summary = kb;
  c.grounding = {{"name", "royal spice"}, {"area", "north"}, {"food", "indian"}, {"pricerange", "cheap"}};
  return c;
}

Conditioning probe_belief() {
  Conditioning c;
  c.role = Role::BeliefGeneration;
  c.domain = Domain::Train;
  c.last_user = "i need a train to cambridge on saturday .";
  c.belief = "train";
  return c;
}

std::vector<std::string> candidates_of(const json &reply) {
  if (!reply.is_object() || !reply.contains("candidates") || !reply["candidates"].is_array()) {
    throw SchemaError("reply is not an object with a 'candidates' array");
  }
  for (const json &c : reply["candidates"]) {
    if (!c.is_string()) throw SchemaError("a candidate is not a string");
  }
  return reply["candidates"].get<std::vector<std::string>>();
}

// Expects the server to refuse `body` with a 4xx status.
std::string expect_rejection(const RemoteConfig &cfg, const std::string &path, const std::string &body) {
  const Endpoint ep = parse_url(cfg.url);
  httplib::Client client(ep.origin);
  client.set_connection_timeout(std::chrono::milliseconds(cfg.timeout_ms));
  client.set_read_timeout(std::chrono::milliseconds(cfg.timeout_ms));
  auto res = client.Post(ep.prefix + path, body, "application/json");
  if (!res) return "request failed: " + httplib::to_string(res.error());
  if (res->status >= 400 && res->status < 500) return "";
  return "expected a 4xx status, got " + std::to_string(res->status);
}

}  // namespace

std::vector<ConformanceCheck> serve_check(const RemoteConfig &cfg) {
  std::vector<ConformanceCheck> out;
  auto run = [&](const std::string &name, const std::function<std::string()> &body) {
    ConformanceCheck c{name, false, ""};
    try {
      c.detail = body();
      c.passed = c.detail.empty();
    } catch (const std::exception &e) {
      c.detail = e.what();
    }
    out.push_back(std::move(c));
  };
  SamplingConfig sampling;
  sampling.seed = 1234;

  run("generate_schema", [&] {
    candidates_of(post_json(cfg, "/generate", generate_request(probe_user(), sampling)));
    return std::string();
  });
  run("generate_pool_size", [&] {
    for (int r : {1, 3, 5, 8}) {
      SamplingConfig s = sampling;
      s.pool_size = r;
      const auto got = candidates_of(post_json(cfg, "/generate", generate_request(probe_agent(), s)));
      if (static_cast<int>(got.size()) != r) {
        return "pool_size " + std::to_string(r) + " returned " + std::to_string(got.size()) + " candidates";
      }
    }
    return std::string();
  });
  run("generate_deterministic", [&] {
    const json req = generate_request(probe_user(), sampling);
    if (candidates_of(post_json(cfg, "/generate", req)) != candidates_of(post_json(cfg, "/generate", req))) {
      return std::string("two requests with seed 1234 returned different candidates");
    }
    return std::string();
  });
  run("generate_max_tokens", [&] {
    SamplingConfig s = sampling;
    s.max_tokens = 3;
    for (const std::string &c : candidates_of(post_json(cfg, "/generate", generate_request(probe_agent(), s)))) {
      if (tokenize(c).size() > 3) return "candidate '" + c + "' exceeds max_tokens 3";
    }
    return std::string();
  });
  run("belief_schema", [&] {
    const json reply = post_json(cfg, "/belief", belief_request(probe_belief()));
    if (!reply.contains("belief_state") || !reply["belief_state"].is_string()) {
      return std::string("reply lacks a string 'belief_state'");
    }
    const BeliefState b = repair_belief(reply["belief_state"].get<std::string>());
    if (b.domain() != Domain::Train) return "belief names domain " + std::string(domain_name(b.domain()));
    return std::string();
  });
  run("score_range", [&] {
    ScoringContext ctx{{"i am looking for a cheap indian restaurant ."}, {{"food", "indian"}}};
    for (const std::string cand : {"[restaurant_name] serves [value_food] food .", "i am looking for a cheap indian restaurant ."}) {
      const json reply = post_json(cfg, "/score", score_request(ctx, cand));
      if (!reply.contains("score") || !reply["score"].is_number()) return std::string("reply lacks a numeric 'score'");
      const double s = reply["score"].get<double>();
      if (!(s > 0.0 && s < 1.0)) return "score " + std::to_string(s) + " outside (0, 1)";
    }
    return std::string();
  });
  run("rejects_malformed_body", [&] {
    for (const char *path : {"/generate", "/belief", "/score"}) {
      std::string why = expect_rejection(cfg, path, "{not json");
      if (!why.empty()) return std::string(path) + ": " + why;
    }
    json missing = generate_request(probe_user(), sampling);
    missing.erase("goal");
    std::string why = expect_rejection(cfg, "/generate", missing.dump());
    return why.empty() ? why : "user request without goal: " + why;
  });
  run("concurrent_requests", [&] {
    std::vector<std::future<std::vector<std::string>>> futures;
    for (int i = 0; i < 8; ++i) {
      futures.push_back(std::async(std::launch::async, [&cfg, &sampling, i] {
        SamplingConfig s = sampling;
        s.seed = static_cast<std::uint64_t>(i);
        return candidates_of(post_json(cfg, "/generate", generate_request(probe_user(), s)));
      }));
    }
    for (int i = 0; i < 8; ++i) {
      SamplingConfig s = sampling;
      s.seed = static_cast<std::uint64_t>(i);
      const auto serial = candidates_of(post_json(cfg, "/generate", generate_request(probe_user(), s)));
      if (futures[static_cast<std::size_t>(i)].get() != serial) {
        return "concurrent reply " + std::to_string(i) + " differs from the serial one";
      }
    }
    return std::string();
  });
  return out;
}

}  // namespace dialoforge
