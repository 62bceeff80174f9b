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

#ifndef DIALOFORGE_KB_HPP_
#define DIALOFORGE_KB_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dialoforge/belief.hpp"
#include "dialoforge/domain.hpp"

namespace dialoforge {

struct GoalSegment;

using Entity = std::map<std::string, std::string>;

// Slot vocabulary of one domain. Informable and requestable slots are entity
// attributes; booking slots (people, time, ...) only parameterize bookings
// and are ignored by query().
struct DomainSlots {
  std::set<std::string> informable;
  std::set<std::string> requestable;
  std::set<std::string> booking;

  bool is_attribute(const std::string &slot) const {
    return informable.contains(slot) || requestable.contains(slot);
  }
  bool contains(const std::string &slot) const {
    return is_attribute(slot) || booking.contains(slot);
  }
  std::set<std::string> all() const;
};

struct BookingResult {
  bool success = false;
  std::optional<std::string> reference;
  std::optional<std::string> fee;

  friend bool operator==(const BookingResult &, const BookingResult &) = default;
};

// Entities matching a query, ordered by name. Points into the owning
// KnowledgeBase, which must outlive it.
struct EntitySet {
  std::vector<const Entity *> entities;

  std::size_t size() const { return entities.size(); }
  bool empty() const { return entities.empty(); }
  const Entity &front() const { return *entities.front(); }
};

class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  // Validates attribute keys against the vocabulary and name uniqueness;
  // sorts each table by name. Throws SchemaError.
  KnowledgeBase(std::map<Domain, std::vector<Entity>> tables, std::map<Domain, DomainSlots> slots);

  bool has_domain(Domain d) const { return tables_.contains(d); }
  const std::vector<Entity> &table(Domain d) const;
  const DomainSlots &slots(Domain d) const;
  const std::map<Domain, std::vector<Entity>> &tables() const { return tables_; }
  const std::map<Domain, DomainSlots> &slot_vocab() const { return slots_; }

  // Distinct values of an attribute across a domain table.
  std::set<std::string> values(Domain d, const std::string &slot) const;

 private:
  std::map<Domain, std::vector<Entity>> tables_;
  std::map<Domain, DomainSlots> slots_;
};

inline constexpr std::string_view kDontCare = "dontcare";

// Single-constraint match: equality; arrive_by entity <= wanted; leave_at
// entity >= wanted; "dontcare" matches everything.
bool slot_matches(const std::string &slot, const std::string &entity_value, const std::string &wanted);

// Throws UnknownDomain, UnknownSlot.
EntitySet query(const KnowledgeBase &kb, const BeliefState &state);

// Goal-driven booking simulation. Fails iff the segment carries a fallback on
// slot s and the requested value for s is still the primary one. Throws
// NoMatchingEntity when query(kb, state) is empty.
BookingResult book(const KnowledgeBase &kb, const BeliefState &state,
                   const std::map<std::string, std::string> &booking, const GoalSegment &segment,
                   std::uint64_t seed);

// 8 characters from A-Z0-9, a pure function of seed.
std::string make_reference(std::uint64_t seed);

// Directory layout: kb.json (domain -> entity list) and slots.json
// (domain -> {informable, requestable, booking}). A path to kb.json also works.
KnowledgeBase load_kb(const std::filesystem::path &path);
void save_kb(const KnowledgeBase &kb, const std::filesystem::path &dir);

}  // namespace dialoforge

#endif  // DIALOFORGE_KB_HPP_
