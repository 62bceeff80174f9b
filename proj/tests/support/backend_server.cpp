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

#include "backend_server.hpp"

#include <httplib.h>
#include <json.hpp>

#include "dialoforge/errors.hpp"
#include "dialoforge/remote.hpp"

namespace dialoforge::testing {

using nlohmann::json;

namespace {

void reply_json(httplib::Response &res, int status, const json &body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Runs `handle` on the parsed body, mapping client mistakes to 400.
template <typename F>
void guarded(const httplib::Request &req, httplib::Response &res, F handle) {
  try {
    const json body = json::parse(req.body);
    if (!body.is_object()) throw SchemaError("request body must be a JSON object");
    reply_json(res, 200, handle(body));
  } catch (const json::exception &e) {
    reply_json(res, 400, {{"error", "SchemaError"}, {"message", e.what()}});
  } catch (const SchemaError &e) {
    reply_json(res, 400, {{"error", e.code()}, {"message", e.what()}});
  } catch (const InvalidArgument &e) {
    reply_json(res, 400, {{"error", e.code()}, {"message", e.what()}});
  } catch (const std::exception &e) {
    reply_json(res, 500, {{"error", "InternalError"}, {"message", e.what()}});
  }
}

}  // namespace

BackendServer::BackendServer(const GenerationBackend &backend, const Scorer &scorer, const std::string &host,
                             int port)
    : server_(std::make_unique<httplib::Server>()), host_(host) {
  server_->Post("/generate", [&backend](const httplib::Request &req, httplib::Response &res) {
    guarded(req, res, [&](const json &body) {
      const Conditioning cond = conditioning_from_json(body);
      validate_conditioning(cond);
      SamplingConfig cfg;
      cfg.pool_size = body.at("pool_size").get<int>();
      cfg.nucleus_p = body.at("nucleus_p").get<double>();
      cfg.max_tokens = body.at("max_tokens").get<int>();
      cfg.seed = body.at("seed").get<std::uint64_t>();
      cfg.validate();
      return json{{"candidates", backend.generate(cond, cfg)}};
    });
  });
  server_->Post("/belief", [&backend](const httplib::Request &req, httplib::Response &res) {
    guarded(req, res, [&](const json &body) {
      const Conditioning cond = conditioning_from_json(body);
      validate_conditioning(cond);
      return json{{"belief_state", backend.belief(cond)}};
    });
  });
  server_->Post("/score", [&scorer](const httplib::Request &req, httplib::Response &res) {
    guarded(req, res, [&](const json &body) {
      const ScoringContext ctx = scoring_context_from_json(body);
      return json{{"score", scorer.score(ctx, body.at("candidate").get<std::string>())}};
    });
  });
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ <= 0) throw BackendUnavailable("backend server could not bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

BackendServer::~BackendServer() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace dialoforge::testing
