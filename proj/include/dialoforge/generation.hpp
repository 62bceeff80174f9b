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

#ifndef DIALOFORGE_GENERATION_HPP_
#define DIALOFORGE_GENERATION_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dialoforge/belief.hpp"
#include "dialoforge/corpus.hpp"
#include "dialoforge/delex.hpp"
#include "dialoforge/domain.hpp"
#include "dialoforge/goals.hpp"
#include "dialoforge/kb.hpp"

namespace dialoforge {

enum class Role { UserResponse, AgentResponse, BeliefGeneration };

std::string_view role_name(Role role);
// Throws SchemaError.
Role role_from_string(std::string_view name);

enum class BookingStatus { None, Failed, Succeeded };

std::string_view booking_status_name(BookingStatus s);

struct KbSummary {
  int count = 0;
  Entity top;  // first matching entity, empty when count == 0
  BookingStatus booking = BookingStatus::None;

  friend bool operator==(const KbSummary &, const KbSummary &) = default;
};

// Everything a generator may condition on. `grounding` lists the values the
// response may mention: the goal for the user side, the top entity plus
// booking details for the agent side. Placeholders whose slot is absent from
// it cannot be realized.
struct Conditioning {
  Role role = Role::UserResponse;
  Domain domain = Domain::Restaurant;
  std::optional<std::string> goal_text;
  std::vector<Turn> history;
  std::optional<std::string> last_user;
  std::optional<std::string> belief;
  std::optional<KbSummary> kb_summary;
  ValueRecord grounding;
};

// Throws InvalidArgument when the fields required by the role are missing.
void validate_conditioning(const Conditioning &cond);

struct SamplingConfig {
  int pool_size = 5;
  double nucleus_p = 0.9;
  int max_tokens = 60;
  std::uint64_t seed = 0;

  // Throws InvalidArgument.
  void validate() const;
};

// Wire form shared by every backend: each conditioning field as a named
// string, in the fixed order goal, history, last_user, belief, kb_summary.
inline constexpr int kConditioningFormatVersion = 1;
nlohmann::json conditioning_to_json(const Conditioning &cond);
Conditioning conditioning_from_json(const nlohmann::json &j);

std::string render_history(const std::vector<Turn> &history);
std::string render_kb_summary(const KbSummary &kb);

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;

  // Exactly cfg.pool_size candidate strings; a pure function of its inputs.
  virtual std::vector<std::string> generate(const Conditioning &cond,
                                            const SamplingConfig &cfg) const = 0;
  // Greedy belief string for a BeliefGeneration conditioning.
  virtual std::string belief(const Conditioning &cond) const = 0;
};

KbSummary summarize(const KnowledgeBase &kb, const BeliefState &belief,
                    BookingStatus status = BookingStatus::None);

// Belief values, top-entity attributes and, while a booking is still
// possible, a stand-in reference.
ValueRecord agent_grounding(const BeliefState &belief, const KbSummary &kb);

// Conditionings for a dialog prefix, shared by training and simulation.
Conditioning user_conditioning(const Goal &goal, std::size_t segment,
                               const GoalTemplates &templates,
                               const std::vector<Turn> &history);
Conditioning agent_conditioning(Domain domain, const std::vector<Turn> &history,
                                const std::string &last_user, const BeliefState &belief,
                                const KbSummary &kb);

// Validates inputs, then delegates. Throws EmptyPool when the backend returns
// the wrong number of candidates.
std::vector<std::string> generate_pool(const GenerationBackend &backend, const Conditioning &cond,
                                       const SamplingConfig &cfg);

// Greedy belief plus the repair rule. Throws UnparseableBelief.
BeliefState generate_belief(const GenerationBackend &backend, const Conditioning &cond);

}  // namespace dialoforge

#endif  // DIALOFORGE_GENERATION_HPP_
