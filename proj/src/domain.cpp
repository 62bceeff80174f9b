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

#include "dialoforge/domain.hpp"

#include "dialoforge/errors.hpp"

namespace dialoforge {

std::string_view domain_name(Domain d) {
  switch (d) {
    case Domain::Attraction: return "attraction";
    case Domain::Train: return "train";
    case Domain::Police: return "police";
    case Domain::Hotel: return "hotel";
    case Domain::Hospital: return "hospital";
    case Domain::Restaurant: return "restaurant";
    case Domain::Taxi: return "taxi";
  }
  return "unknown";
}

std::optional<Domain> parse_domain(std::string_view name) {
  for (Domain d : kAllDomains) {
    if (domain_name(d) == name) return d;
  }
  return std::nullopt;
}

Domain domain_from_string(std::string_view name) {
  if (auto d = parse_domain(name)) return *d;
  throw UnknownDomain("unknown domain '" + std::string(name) + "'");
}

std::string_view speaker_name(Speaker s) { return s == Speaker::User ? "user" : "agent"; }

Speaker speaker_from_string(std::string_view name) {
  if (name == "user") return Speaker::User;
  if (name == "agent") return Speaker::Agent;
  throw SchemaError("speaker must be 'user' or 'agent', got '" + std::string(name) + "'");
}

}  // namespace dialoforge
