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

#ifndef DIALOFORGE_DELEX_HPP_
#define DIALOFORGE_DELEX_HPP_

#include <map>
#include <set>
#include <string>
#include <string_view>

#include "dialoforge/domain.hpp"
#include "dialoforge/kb.hpp"

namespace dialoforge {

// Attribute record used for (de|re)lexicalization: entity attributes merged
// with booking values (people, time, reference, ...).
using ValueRecord = std::map<std::string, std::string>;

// name/reference/address -> [<domain>_<slot>]; people -> [value_count];
// any other slot -> [value_<slot>].
std::string placeholder_for(Domain domain, std::string_view slot);

// Inverse of placeholder_for, without the domain: "[hotel_name]" -> "name",
// "[value_count]" -> "people", "[value_area]" -> "area".
std::string slot_for_placeholder(std::string_view placeholder);

// Every placeholder a domain's vocabulary can produce.
std::set<std::string> placeholder_inventory(Domain domain, const DomainSlots &slots);

// Replaces every case-insensitive, word-bounded occurrence of a record value
// by its placeholder. Longest value first, scanning left to right; existing
// placeholders are left untouched, so the operation is idempotent.
std::string delexicalize(std::string_view text, const ValueRecord &record, Domain domain);

// Substitutes every placeholder from the record. Throws UnresolvedPlaceholder.
std::string relexicalize(std::string_view text, const ValueRecord &record);

// As relexicalize, but leaves unresolvable placeholders in place and counts them.
std::string relexicalize_partial(std::string_view text, const ValueRecord &record,
                                 int *unresolved = nullptr);

// Goal values a user simulator may copy into its utterances: constraints and
// booking values under their slot names, the fallback value under
// "alt_<slot>" (placeholder [value_alt_<slot>]).
ValueRecord goal_grounding(const GoalSegment &segment);

}  // namespace dialoforge

#endif  // DIALOFORGE_DELEX_HPP_
