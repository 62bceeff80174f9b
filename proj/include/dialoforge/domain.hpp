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

#ifndef DIALOFORGE_DOMAIN_HPP_
#define DIALOFORGE_DOMAIN_HPP_

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace dialoforge {

enum class Domain { Attraction, Train, Police, Hotel, Hospital, Restaurant, Taxi };

inline constexpr std::array<Domain, 7> kAllDomains = {
    Domain::Attraction, Domain::Train,      Domain::Police, Domain::Hotel,
    Domain::Hospital,   Domain::Restaurant, Domain::Taxi};

std::string_view domain_name(Domain d);
std::optional<Domain> parse_domain(std::string_view name);
// Throws UnknownDomain.
Domain domain_from_string(std::string_view name);

enum class Speaker { User, Agent };

std::string_view speaker_name(Speaker s);
Speaker speaker_from_string(std::string_view name);

}  // namespace dialoforge

#endif  // DIALOFORGE_DOMAIN_HPP_
