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

#include "dialoforge/kb.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "dialoforge/corpus.hpp"
#include "dialoforge/errors.hpp"
#include "dialoforge/rng.hpp"
#include "dialoforge/text.hpp"

namespace dialoforge {

using nlohmann::json;

std::set<std::string> DomainSlots::all() const {
  std::set<std::string> out = informable;
  out.insert(requestable.begin(), requestable.end());
  out.insert(booking.begin(), booking.end());
  return out;
}

KnowledgeBase::KnowledgeBase(std::map<Domain, std::vector<Entity>> tables,
                             std::map<Domain, DomainSlots> slots)
    : tables_(std::move(tables)), slots_(std::move(slots)) {
  for (auto &[domain, rows] : tables_) {
    auto vocab = slots_.find(domain);
    if (vocab == slots_.end()) {
      throw SchemaError("no slot vocabulary for domain " + std::string(domain_name(domain)));
    }
    std::set<std::string> names;
    for (const Entity &e : rows) {
      auto name = e.find("name");
      if (name == e.end() || name->second.empty()) {
        throw SchemaError(std::string(domain_name(domain)) + " entity without a name");
      }
      if (!names.insert(name->second).second) {
        throw SchemaError("duplicate " + std::string(domain_name(domain)) + " entity '" +
                          name->second + "'");
      }
      for (const auto &[key, value] : e) {
        if (!vocab->second.is_attribute(key)) {
          throw SchemaError(std::string(domain_name(domain)) + " entity '" + name->second +
                            "' has attribute '" + key + "' outside the slot vocabulary");
        }
      }
    }
    std::sort(rows.begin(), rows.end(),
              [](const Entity &a, const Entity &b) { return a.at("name") < b.at("name"); });
  }
}

const std::vector<Entity> &KnowledgeBase::table(Domain d) const {
  auto it = tables_.find(d);
  if (it == tables_.end()) {
    throw UnknownDomain("knowledge base has no table for " + std::string(domain_name(d)));
  }
  return it->second;
}

const DomainSlots &KnowledgeBase::slots(Domain d) const {
  auto it = slots_.find(d);
  if (it == slots_.end()) {
    throw UnknownDomain("knowledge base has no slot vocabulary for " + std::string(domain_name(d)));
  }
  return it->second;
}

std::set<std::string> KnowledgeBase::values(Domain d, const std::string &slot) const {
  std::set<std::string> out;
  if (!has_domain(d)) return out;
  for (const Entity &e : table(d)) {
    auto it = e.find(slot);
    if (it != e.end()) out.insert(it->second);
  }
  return out;
}

bool slot_matches(const std::string &slot, const std::string &entity_value,
                  const std::string &wanted) {
  if (wanted == kDontCare) return true;
  if (slot == "arrive_by" || slot == "leave_at") {
    auto have = parse_clock(entity_value);
    auto want = parse_clock(wanted);
    if (have && want) return slot == "arrive_by" ? *have <= *want : *have >= *want;
  }
  return entity_value == wanted;
}

EntitySet query(const KnowledgeBase &kb, const BeliefState &state) {
  const std::vector<Entity> &rows = kb.table(state.domain());
  const DomainSlots &vocab = kb.slots(state.domain());
  std::vector<std::pair<std::string, std::string>> filters;
  for (const auto &[slot, value] : state.pairs()) {
    if (!vocab.contains(slot)) {
      throw UnknownSlot("slot '" + slot + "' is not in the " +
                        std::string(domain_name(state.domain())) + " vocabulary");
    }
    if (vocab.is_attribute(slot)) filters.emplace_back(slot, value);
  }
  EntitySet result;
  for (const Entity &e : rows) {
    bool ok = true;
    for (const auto &[slot, value] : filters) {
      if (value == kDontCare) continue;
      auto it = e.find(slot);
      if (it == e.end() || !slot_matches(slot, it->second, value)) {
        ok = false;
        break;
      }
    }
    if (ok) result.entities.push_back(&e);
  }
  return result;
}

std::string make_reference(std::uint64_t seed) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  Rng rng(mix_seed(seed));
  std::string ref(8, 'A');
  for (char &c : ref) c = kAlphabet[rng.below(36)];
  return ref;
}

BookingResult book(const KnowledgeBase &kb, const BeliefState &state,
                   const std::map<std::string, std::string> &booking, const GoalSegment &segment,
                   std::uint64_t seed) {
  EntitySet matches = query(kb, state);
  if (matches.empty()) {
    throw NoMatchingEntity("no " + std::string(domain_name(state.domain())) +
                           " entity matches '" + serialize_belief(state) + "'");
  }
  BookingResult result;
  if (segment.fallback) {
    const std::string &slot = segment.fallback->first;
    std::optional<std::string> requested;
    if (auto it = booking.find(slot); it != booking.end()) {
      requested = it->second;
    } else {
      requested = state.get(slot);
    }
    auto primary = segment.primary_value(slot);
    if (requested && primary && *requested == *primary) return result;
  }
  result.success = true;
  result.reference = make_reference(seed);
  const Entity &top = matches.front();
  if (auto it = top.find("price"); it != top.end()) result.fee = it->second;
  return result;
}

namespace {

std::filesystem::path resolve(const std::filesystem::path &path, const char *file) {
  if (std::filesystem::is_directory(path)) return path / file;
  return path;
}

json read_json(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

std::set<std::string> string_set(const json &j, const std::string &where) {
  std::set<std::string> out;
  if (j.is_null()) return out;
  if (!j.is_array()) throw SchemaError(where + ": expected an array of slot names");
  for (const auto &v : j) {
    if (!v.is_string()) throw SchemaError(where + ": expected a string");
    out.insert(v.get<std::string>());
  }
  return out;
}

}  // namespace

KnowledgeBase load_kb(const std::filesystem::path &path) {
  std::filesystem::path kb_file = resolve(path, "kb.json");
  std::filesystem::path slot_file = kb_file.parent_path() / "slots.json";
  json tables_json = read_json(kb_file);
  json slots_json = read_json(slot_file);

  std::map<Domain, DomainSlots> slots;
  for (const auto &[name, spec] : slots_json.items()) {
    Domain d = domain_from_string(name);
    std::string where = slot_file.string() + ": " + name;
    slots[d] = DomainSlots{string_set(spec.value("informable", json()), where + ".informable"),
                           string_set(spec.value("requestable", json()), where + ".requestable"),
                           string_set(spec.value("booking", json()), where + ".booking")};
  }
  std::map<Domain, std::vector<Entity>> tables;
  for (const auto &[name, rows] : tables_json.items()) {
    Domain d = domain_from_string(name);
    if (!rows.is_array()) throw SchemaError(kb_file.string() + ": " + name + ": expected an array");
    auto &table = tables[d];
    std::size_t row = 0;
    for (const auto &r : rows) {
      Entity e;
      for (const auto &[k, v] : r.items()) {
        if (!v.is_string()) {
          throw SchemaError(kb_file.string() + ": " + name + "[" + std::to_string(row) + "]." + k +
                            ": expected a string value");
        }
        e[k] = v.get<std::string>();
      }
      table.push_back(std::move(e));
      ++row;
    }
  }
  return KnowledgeBase(std::move(tables), std::move(slots));
}

void save_kb(const KnowledgeBase &kb, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  json tables = json::object();
  for (const auto &[d, rows] : kb.tables()) {
    json arr = json::array();
    for (const Entity &e : rows) arr.push_back(e);
    tables[std::string(domain_name(d))] = std::move(arr);
  }
  json slots = json::object();
  for (const auto &[d, s] : kb.slot_vocab()) {
    slots[std::string(domain_name(d))] = {
        {"informable", s.informable}, {"requestable", s.requestable}, {"booking", s.booking}};
  }
  std::ofstream(dir / "kb.json") << tables.dump(1) << "\n";
  std::ofstream(dir / "slots.json") << slots.dump(2) << "\n";
}

}  // namespace dialoforge
