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

#include "dialoforge/toy_world.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <set>

#include "dialoforge/errors.hpp"
#include "dialoforge/rng.hpp"
#include "dialoforge/text.hpp"

namespace dialoforge {

namespace {

using Strings = std::vector<std::string>;

const Strings kDays = {"monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"};

std::string clock(int minutes) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d:%02d", (minutes / 60) % 24, minutes % 60);
  return buf;
}

std::string phone(Rng &rng) {
  std::string p = "01223";
  for (int i = 0; i < 6; ++i) p += static_cast<char>('0' + rng.below(10));
  return p;
}

std::string postcode(Rng &rng) {
  static constexpr char kLetters[] = "abdefghjlnpqrstuwxyz";
  std::string p = "cb" + std::to_string(1 + rng.below(5)) + " " + std::to_string(rng.below(10));
  p += kLetters[rng.below(20)];
  p += kLetters[rng.below(20)];
  return p;
}

std::string address(Rng &rng) {
  static const Strings kStreets = {"regent street", "hills road",   "king street",
                                   "mill road",     "bridge street", "trumpington street",
                                   "newmarket road", "chesterton road", "castle street"};
  return std::to_string(2 + rng.below(98)) + " " + kStreets[rng.below(kStreets.size())];
}

void add_contact(Entity &e, Rng &rng) {
  e["address"] = address(rng);
  e["phone"] = phone(rng);
  e["postcode"] = postcode(rng);
}

struct TrainRoute {
  std::string station;
  int minutes;
  std::string price;
};

const std::vector<TrainRoute> kTrainRoutes = {
    {"ely", 17, "4.40"},        {"london kings cross", 51, "23.60"}, {"norwich", 79, "17.60"},
    {"stevenage", 49, "12.80"}, {"peterborough", 50, "16.50"},       {"bishops stortford", 38, "10.10"}};

const Strings kTaxiPlaces = {"cambridge station", "clare college", "the junction",
                             "royal spice",       "gonville hotel", "kings college"};

}  // namespace

KnowledgeBase toy_kb() {
  Rng rng(0x70ce);
  std::map<Domain, std::vector<Entity>> tables;
  std::map<Domain, DomainSlots> slots;

  slots[Domain::Restaurant] = {{"food", "pricerange", "area", "name"},
                               {"address", "phone", "postcode"},
                               {"people", "time", "day"}};
  const std::vector<Strings> restaurants = {
      {"curry garden", "indian", "expensive", "centre"},
      {"royal spice", "indian", "cheap", "north"},
      {"the gandhi", "indian", "cheap", "centre"},
      {"kohinoor", "indian", "cheap", "centre"},
      {"curry prince", "indian", "moderate", "east"},
      {"the nirala", "indian", "moderate", "north"},
      {"tandoori palace", "indian", "expensive", "west"},
      {"frankie and bennys", "italian", "expensive", "south"},
      {"caffe uno", "italian", "expensive", "centre"},
      {"pizza hut city centre", "italian", "cheap", "centre"},
      {"la margherita", "italian", "moderate", "west"},
      {"pizza express", "italian", "moderate", "centre"},
      {"golden wok", "chinese", "moderate", "north"},
      {"charlie chan", "chinese", "cheap", "centre"},
      {"hakka", "chinese", "expensive", "north"},
      {"the good luck", "chinese", "expensive", "south"},
      {"cote", "french", "expensive", "centre"},
      {"restaurant two two", "french", "expensive", "north"},
      {"meze bar", "turkish", "expensive", "centre"},
      {"anatolia", "turkish", "moderate", "centre"},
      {"efes", "turkish", "moderate", "centre"},
      {"nandos", "portuguese", "cheap", "south"},
      {"bedouin", "african", "expensive", "centre"},
      {"saigon city", "asian oriental", "expensive", "north"}};
  for (const Strings &r : restaurants) {
    Entity e{{"name", r[0]}, {"food", r[1]}, {"pricerange", r[2]}, {"area", r[3]}};
    add_contact(e, rng);
    tables[Domain::Restaurant].push_back(std::move(e));
  }

  slots[Domain::Hotel] = {{"area", "pricerange", "stars", "name"},
                          {"address", "phone", "postcode"},
                          {"people", "day", "stay"}};
  const std::vector<Strings> hotels = {
      {"acorn guest house", "north", "moderate", "4"},
      {"alexander bed and breakfast", "centre", "cheap", "4"},
      {"allenbell", "east", "cheap", "4"},
      {"aylesbray lodge", "south", "moderate", "4"},
      {"cityroomz", "centre", "moderate", "2"},
      {"el shaddai", "centre", "cheap", "3"},
      {"gonville hotel", "centre", "expensive", "3"},
      {"huntingdon marriott", "west", "expensive", "4"},
      {"lovell lodge", "north", "moderate", "2"},
      {"university arms", "centre", "expensive", "4"},
      {"worth house", "north", "cheap", "4"},
      {"hamilton lodge", "north", "moderate", "3"},
      {"express by holiday inn", "east", "expensive", "2"},
      {"the lensfield", "south", "expensive", "3"},
      {"finches", "west", "cheap", "4"},
      {"avalon", "north", "moderate", "4"}};
  for (const Strings &h : hotels) {
    Entity e{{"name", h[0]}, {"area", h[1]}, {"pricerange", h[2]}, {"stars", h[3]}};
    add_contact(e, rng);
    tables[Domain::Hotel].push_back(std::move(e));
  }

  slots[Domain::Attraction] = {{"type", "area", "name"}, {"address", "phone", "postcode", "price"}, {}};
  const std::vector<Strings> attractions = {
      {"fitzwilliam museum", "museum", "centre", "free"},
      {"kettles yard", "museum", "west", "free"},
      {"museum of technology", "museum", "east", "5 pounds"},
      {"broughton house gallery", "museum", "centre", "free"},
      {"clare college", "college", "west", "2 pounds"},
      {"kings college", "college", "centre", "free"},
      {"christs college", "college", "centre", "free"},
      {"botanic garden", "park", "centre", "4 pounds"},
      {"milton country park", "park", "north", "free"},
      {"wandlebury country park", "park", "south", "free"},
      {"adc theatre", "theatre", "centre", "7 pounds"},
      {"the junction", "theatre", "south", "6 pounds"},
      {"great saint marys church", "architecture", "centre", "2 pounds"},
      {"all saints church", "architecture", "centre", "free"},
      {"ballare", "nightclub", "centre", "5 pounds"},
      {"club salsa", "nightclub", "centre", "5 pounds"}};
  for (const Strings &a : attractions) {
    Entity e{{"name", a[0]}, {"type", a[1]}, {"area", a[2]}, {"price", a[3]}};
    add_contact(e, rng);
    tables[Domain::Attraction].push_back(std::move(e));
  }

  slots[Domain::Police] = {{"name"}, {"address", "phone", "postcode"}, {}};
  tables[Domain::Police].push_back({{"name", "parkside police station"},
                                    {"address", "parkside"},
                                    {"phone", "01223358966"},
                                    {"postcode", "cb1 1jg"}});

  slots[Domain::Hospital] = {{"department", "name"}, {"address", "phone", "postcode"}, {}};
  for (const std::string dept : {"cardiology", "neurology", "paediatrics", "oncology",
                                 "haematology", "urology", "gastroenterology", "emergency"}) {
    tables[Domain::Hospital].push_back({{"name", "addenbrookes " + dept + " unit"},
                                        {"department", dept},
                                        {"address", "hills road"},
                                        {"phone", phone(rng)},
                                        {"postcode", "cb2 0qq"}});
  }

  slots[Domain::Taxi] = {{"departure", "destination"}, {"name", "phone"}, {"leave_at"}};
  const Strings colors = {"black", "white", "red", "blue", "grey", "yellow"};
  const Strings brands = {"toyota", "ford", "audi", "skoda", "volvo", "tesla"};
  std::size_t car = 0;
  for (const std::string &from : kTaxiPlaces) {
    for (const std::string &to : kTaxiPlaces) {
      if (from == to) continue;
      tables[Domain::Taxi].push_back({{"name", colors[car % 6] + " " + brands[(car / 6) % 6]},
                                      {"departure", from},
                                      {"destination", to},
                                      {"phone", "07" + phone(rng).substr(4)}});
      ++car;
    }
  }

  slots[Domain::Train] = {{"departure", "destination", "day", "leave_at", "arrive_by"},
                          {"name", "price", "duration"},
                          {"people"}};
  std::set<std::string> used = {"TR7994"};
  for (const TrainRoute &route : kTrainRoutes) {
    for (int dir = 0; dir < 2; ++dir) {
      const std::string from = dir == 0 ? route.station : "cambridge";
      const std::string to = dir == 0 ? "cambridge" : route.station;
      for (const std::string &day : kDays) {
        for (int k = 0; k < 9; ++k) {
          const int leave = 5 * 60 + 35 + 120 * k;
          std::string name;
          if (from == "ely" && to == "cambridge" && day == "saturday" && k == 0) {
            name = "TR7994";
          } else {
            do {
              // Later ely trains on that saturday sort after TR7994.
              const bool after = from == "ely" && to == "cambridge" && day == "saturday";
              name = "TR" + std::to_string(after ? 8000 + rng.below(2000) : 1000 + rng.below(9000));
            } while (!used.insert(name).second);
          }
          tables[Domain::Train].push_back({{"name", name},
                                           {"departure", from},
                                           {"destination", to},
                                           {"day", day},
                                           {"leave_at", clock(leave)},
                                           {"arrive_by", clock(leave + route.minutes)},
                                           {"price", route.price},
                                           {"duration", std::to_string(route.minutes)}});
        }
      }
    }
  }
  return KnowledgeBase(std::move(tables), std::move(slots));
}

GoalTemplates toy_templates() {
  GoalTemplates t;
  const std::string booked = "Make sure you get the {items}.";
  auto contact = [](DomainTemplate &d) {
    d.requests["address"] = "address";
    d.requests["phone"] = "phone number";
    d.requests["postcode"] = "postcode";
    d.requests["reference"] = "reference number";
  };
  DomainTemplate r;
  r.slots = {{"food", "The restaurant should serve {value} food."},
             {"pricerange", "The restaurant should be in the {value} price range."},
             {"area", "The restaurant should be in the {value}."},
             {"name", "You are looking for a particular restaurant called {value}."},
             {"people", "Once you find the restaurant you want to book a table for {value} people."},
             {"time", "The reservation should be at {value}."},
             {"day", "The reservation should be on {value}."}};
  contact(r);
  t[Domain::Restaurant] = r;

  DomainTemplate h;
  h.intro = "You are looking for a place to stay.";
  h.slots = {{"area", "The hotel should be in the {value}."},
             {"pricerange", "The hotel should be in the {value} price range."},
             {"stars", "The hotel should have a star rating of {value}."},
             {"name", "You are looking for a particular hotel called {value}."},
             {"people", "Once you find the hotel you want to book it for {value} people."},
             {"stay", "The stay should be {value} nights."},
             {"day", "The stay should start on {value}."}};
  contact(h);
  t[Domain::Hotel] = h;

  DomainTemplate a;
  a.intro = "You are looking for a place to go.";
  a.slots = {{"type", "The attraction should be a {value}."},
             {"area", "The attraction should be in the {value}."},
             {"name", "You are looking for a particular attraction called {value}."}};
  contact(a);
  a.requests["price"] = "entrance fee";
  t[Domain::Attraction] = a;

  DomainTemplate p;
  p.intro = "You were robbed and are looking for help.";
  p.slots = {{"name", "You want to contact {value}."}};
  contact(p);
  t[Domain::Police] = p;

  DomainTemplate hs;
  hs.intro = "You got injured and are looking for a hospital nearby.";
  hs.slots = {{"department", "The hospital should have the {value} department."},
              {"name", "You want to contact {value}."}};
  contact(hs);
  t[Domain::Hospital] = hs;

  DomainTemplate x;
  x.slots = {{"departure", "The taxi should depart from {value}."},
             {"destination", "The taxi should go to {value}."},
             {"leave_at", "The taxi should leave after {value}."}};
  contact(x);
  x.requests["name"] = "car type";
  t[Domain::Taxi] = x;

  DomainTemplate tr;
  tr.slots = {{"departure", "The train should depart from {value}."},
              {"destination", "The train should go to {value}."},
              {"day", "The train should leave on {value}."},
              {"leave_at", "The train should leave after {value}."},
              {"arrive_by", "The train should arrive by {value}."},
              {"people", "Once you find the train you want to make a booking for {value} people."}};
  contact(tr);
  tr.requests["price"] = "price";
  tr.requests["duration"] = "travel time";
  tr.requests["name"] = "train id";
  t[Domain::Train] = tr;
  for (auto &[d, dt] : t) dt.request_sentence = booked;
  return t;
}

Goal toy_train_goal() {
  GoalSegment s;
  s.domain = Domain::Train;
  s.constraints = {{"arrive_by", "11:45"}, {"day", "saturday"}, {"destination", "cambridge"},
                   {"departure", "ely"}};
  s.booking = {{"people", "8"}};
  s.requestables = {"reference"};
  return Goal{"g1", {s}};
}

Goal toy_restaurant_goal() {
  GoalSegment s;
  s.domain = Domain::Restaurant;
  s.constraints = {{"food", "italian"}, {"pricerange", "expensive"}};
  s.booking = {{"people", "5"}, {"time", "11:30"}, {"day", "sunday"}};
  s.fallback = std::make_pair(std::string("time"), std::string("10:30"));
  s.requestables = {"reference"};
  return Goal{"g4", {s}};
}

GoalChanges toy_perturbation() {
  GoalChanges c;
  c.set = {{"pricerange", "cheap"}, {"food", "indian"}};
  c.add = {{"area", "north"}};
  return c;
}

namespace {

// Writes one scripted dialog: user turns are lexicalized from the goal, agent
// turns are delexicalized and annotated with the belief accumulated so far.
class Script {
 public:
  Script(const KnowledgeBase &kb, const GoalSegment &seg, Rng &rng, std::uint64_t seed)
      : kb_(kb), seg_(seg), rng_(rng), seed_(seed), belief_(seg.domain) {}

  const std::string &pick(const Strings &options) { return options[rng_.below(options.size())]; }
  bool chance(double p) { return rng_.bernoulli(p); }

  // Fills {slot} holes from the goal (constraints, booking, alt_<slot>).
  std::string fill(std::string text) const {
    std::map<std::string, std::string> values = seg_.constraints;
    for (const auto &[k, v] : seg_.booking) values[k] = v;
    if (seg_.fallback) values["alt_" + seg_.fallback->first] = seg_.fallback->second;
    for (const auto &[k, v] : values) {
      const std::string hole = "{" + k + "}";
      for (auto pos = text.find(hole); pos != std::string::npos; pos = text.find(hole)) {
        text.replace(pos, hole.size(), v);
      }
    }
    if (text.find('{') != std::string::npos) throw InvalidArgument("unfilled script hole: " + text);
    return text;
  }

  void user(const std::string &text, const std::map<std::string, std::string> &informs = {}) {
    for (const auto &[slot, value] : informs) belief_.set(slot, value);
    turns_.push_back(Turn{Speaker::User, fill(text), std::nullopt});
  }
  void user_informs(const std::string &text, const std::vector<std::string> &slots) {
    std::map<std::string, std::string> informs;
    for (const std::string &s : slots) {
      if (auto it = seg_.constraints.find(s); it != seg_.constraints.end()) informs[s] = it->second;
      if (auto it = seg_.booking.find(s); it != seg_.booking.end()) informs[s] = it->second;
    }
    user(text, informs);
  }
  void agent(const std::string &text, std::optional<BookingResult> booking = std::nullopt) {
    const int count = static_cast<int>(query(kb_, belief_).size());
    turns_.push_back(Turn{Speaker::Agent, text, AgentAnnotation{belief_, count, booking}});
  }
  int count() const { return static_cast<int>(query(kb_, belief_).size()); }
  BookingResult book_now() {
    std::map<std::string, std::string> booking;
    for (const auto &[slot, value] : belief_.pairs()) {
      if (kb_.slots(seg_.domain).booking.contains(slot)) booking[slot] = value;
    }
    return book(kb_, belief_, booking, seg_, derive_seed(seed_, turns_.size()));
  }
  void set_belief(const std::string &slot, const std::string &value) { belief_.set(slot, value); }
  const BeliefState &belief() const { return belief_; }
  const GoalSegment &segment() const { return seg_; }

  std::string request_answer(const std::map<std::string, std::string> &phrases) const {
    std::vector<std::string> parts;
    for (const std::string &r : seg_.requestables) {
      if (auto it = phrases.find(r); it != phrases.end()) parts.push_back(it->second);
    }
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) out += i + 1 == parts.size() ? " and " : " , ";
      out += parts[i];
    }
    return out;
  }

  void close(const Strings &thanks, const Strings &bye) {
    user(pick(thanks));
    agent(pick(bye));
    turns_.push_back(Turn{Speaker::User, std::string(kEndOfDialogue), std::nullopt});
  }

  std::vector<Turn> take() { return std::move(turns_); }

 private:
  const KnowledgeBase &kb_;
  const GoalSegment &seg_;
  Rng &rng_;
  std::uint64_t seed_;
  BeliefState belief_;
  std::vector<Turn> turns_;
};

const Strings kThanks = {"thank you , that is all i need .", "thank you so much . that's all i needed . bye .",
                         "thanks , that is all for today . goodbye ."};
const Strings kBye = {"you are welcome . have a great day .",
                      "thank you for contacting us . goodbye .",
                      "you are welcome . enjoy your day !"};

// Requestable follow-up shared by every domain: the user asks, the agent
// answers with placeholders.
void ask_requestables(Script &s, Domain d, const std::map<std::string, std::string> &user_names) {
  std::vector<std::string> asked;
  for (const std::string &r : s.segment().requestables) {
    if (auto it = user_names.find(r); it != user_names.end()) asked.push_back(it->second);
  }
  if (asked.empty()) return;
  std::string list;
  for (std::size_t i = 0; i < asked.size(); ++i) {
    if (i > 0) list += i + 1 == asked.size() ? " and " : " , ";
    list += asked[i];
  }
  s.user(s.pick({"can i get the " + list + " please ?", "what is the " + list + " ?",
                 "could you give me the " + list + " ?"}));
  const std::string dn(domain_name(d));
  std::string answer = s.request_answer({{"address", "the address is [" + dn + "_address]"},
                                         {"phone", "the phone number is [value_phone]"},
                                         {"postcode", "the postcode is [value_postcode]"},
                                         {"price", "the price is [value_price]"},
                                         {"duration", "the travel time is [value_duration] minutes"},
                                         {"name", "the car is a [" + dn + "_name]"}});
  s.agent(answer + " . " + s.pick({"is there anything else ?", "can i help with anything else ?"}));
}

const std::map<std::string, std::string> kAskNames = {{"address", "address"},
                                                      {"phone", "phone number"},
                                                      {"postcode", "postcode"},
                                                      {"price", "price"},
                                                      {"duration", "travel time"},
                                                      {"name", "car type"}};

std::set<std::string> sample_requests(Rng &rng, const Strings &pool) {
  std::set<std::string> out;
  for (const std::string &r : pool) {
    if (rng.bernoulli(0.5)) out.insert(r);
  }
  if (out.empty()) out.insert(pool[rng.below(pool.size())]);
  return out;
}

std::string other(Rng &rng, const Strings &pool, const std::string &not_this) {
  std::string v;
  do {
    v = pool[rng.below(pool.size())];
  } while (v == not_this);
  return v;
}

const Strings kMealTimes = {"11:30", "12:00", "12:30", "13:00", "17:30", "18:00", "18:30", "19:00", "19:30"};

GoalSegment restaurant_goal(const KnowledgeBase &kb, Rng &rng) {
  const auto &rows = kb.table(Domain::Restaurant);
  const Entity &e = rows[rng.below(rows.size())];
  GoalSegment s;
  s.domain = Domain::Restaurant;
  s.constraints = {{"food", e.at("food")}, {"pricerange", e.at("pricerange")}};
  if (rng.bernoulli(0.5)) s.constraints["area"] = e.at("area");
  if (rng.bernoulli(0.7)) {
    s.booking = {{"people", std::to_string(1 + rng.below(8))},
                 {"time", kMealTimes[rng.below(kMealTimes.size())]},
                 {"day", kDays[rng.below(7)]}};
    s.requestables = {"reference"};
    if (rng.bernoulli(0.4)) s.fallback = std::make_pair(std::string("time"), other(rng, kMealTimes, s.booking["time"]));
  } else {
    s.requestables = sample_requests(rng, {"address", "phone", "postcode"});
  }
  return s;
}

// Books, and on a scripted failure retries with the fallback value.
void booking_exchange(Script &s, const std::string &ask, const std::string &ok, const std::string &fail,
                      const std::string &retry) {
  s.user_informs(ask, {"people", "time", "day", "stay", "leave_at"});
  BookingResult r = s.book_now();
  if (!r.success) {
    s.agent(fail, r);
    const auto &[slot, alt] = *s.segment().fallback;
    s.user(retry, {{slot, alt}});
    r = s.book_now();
  }
  s.agent(ok, r);
}

std::vector<Turn> restaurant_dialog(Script &s) {
  const GoalSegment &g = s.segment();
  const bool has_area = g.constraints.contains("area");
  if (has_area && s.chance(0.5)) {
    s.user_informs(s.pick({"i am looking for a {pricerange} {food} restaurant in the {area} .",
                           "hi ! can you help me find a {pricerange} {food} restaurant in the {area} ?"}),
                   {"food", "pricerange", "area"});
  } else {
    s.user_informs(s.pick({"i am looking for a {pricerange} restaurant that serves {food} food .",
                           "hi , i'm trying to find a {pricerange} {food} restaurant ."}),
                   {"food", "pricerange"});
    if (s.count() > 1) {
      s.agent(s.pick({"i have found several [value_pricerange] [value_food] restaurants . is there a specific "
                      "area of town that you are looking for ?",
                      "there are a few [value_food] restaurants in that price range . which area would you "
                      "like ?"}));
      if (has_area) {
        s.user_informs(s.pick({"i would like to go to the {area} , please .", "the {area} please ."}), {"area"});
      } else {
        s.user(s.pick({"i do not mind about the area .", "any area is fine ."}));
      }
    }
  }
  const bool booking = !g.booking.empty();
  s.agent(s.pick({"[restaurant_name] is a [value_pricerange] restaurant in the [value_area] serving [value_food] "
                  "food . ",
                  "there is a [value_pricerange] restaurant called [restaurant_name] in the [value_area] . "}) +
          (booking ? s.pick({"would you like to make a reservation ?", "shall i book a table ?"})
                   : s.pick({"is there anything else you need ?", "what else can i do for you ?"})));
  if (booking) {
    booking_exchange(s,
                     s.pick({"yes , i'd like to book a table for {people} people at {time} on {day} .",
                             "please book a table for {people} people on {day} at {time} ."}),
                     s.pick({"booked at [restaurant_name] for [value_count] people . reference number is "
                             "[restaurant_reference] .",
                             "i have booked you a table for [value_count] people at [value_time] on [value_day] . "
                             "your reference number is [restaurant_reference] ."}),
                     s.pick({"i am sorry , but we did not get that reservation . would you like to try another "
                             "day or time slot ?",
                             "i am sorry booking was unsuccessful . would you like another time ?"}),
                     s.pick({"can you try for {alt_time} instead ?", "how about {alt_time} ?"}));
  } else {
    ask_requestables(s, Domain::Restaurant, kAskNames);
  }
  s.close(kThanks, {"enjoy your meal !", "thank you for contacting us . enjoy your dining experience .",
                    "you are welcome . have a great day ."});
  return s.take();
}

GoalSegment hotel_goal(const KnowledgeBase &kb, Rng &rng) {
  const auto &rows = kb.table(Domain::Hotel);
  const Entity &e = rows[rng.below(rows.size())];
  GoalSegment s;
  s.domain = Domain::Hotel;
  s.constraints = {{"area", e.at("area")}, {"pricerange", e.at("pricerange")}};
  if (rng.bernoulli(0.5)) s.constraints["stars"] = e.at("stars");
  if (rng.bernoulli(0.7)) {
    s.booking = {{"people", std::to_string(1 + rng.below(6))},
                 {"stay", std::to_string(1 + rng.below(5))},
                 {"day", kDays[rng.below(7)]}};
    s.requestables = {"reference"};
    if (rng.bernoulli(0.4)) s.fallback = std::make_pair(std::string("day"), other(rng, kDays, s.booking["day"]));
  } else {
    s.requestables = sample_requests(rng, {"address", "phone", "postcode"});
  }
  return s;
}

std::vector<Turn> hotel_dialog(Script &s) {
  const GoalSegment &g = s.segment();
  const bool has_stars = g.constraints.contains("stars");
  if (has_stars && s.chance(0.5)) {
    s.user_informs(s.pick({"i need a {pricerange} hotel in the {area} with {stars} stars .",
                           "i am looking for a place to stay in the {area} . it should be {pricerange} and have "
                           "{stars} stars ."}),
                   {"area", "pricerange", "stars"});
  } else {
    s.user_informs(s.pick({"i need a {pricerange} hotel in the {area} .",
                           "i am looking for a place to stay in the {area} in the {pricerange} price range ."}),
                   {"area", "pricerange"});
    if (s.count() > 1) {
      s.agent(s.pick({"i have several [value_pricerange] places in the [value_area] . do you have a star "
                      "rating in mind ?",
                      "there are a few options . would you like a particular star rating ?"}));
      if (has_stars) {
        s.user_informs(s.pick({"i would like {stars} stars .", "{stars} stars please ."}), {"stars"});
      } else {
        s.user(s.pick({"i do not mind about the stars .", "the star rating does not matter ."}));
      }
    }
  }
  const bool booking = !g.booking.empty();
  s.agent(s.pick({"[hotel_name] is a [value_stars] star hotel in the [value_area] . ",
                  "how about [hotel_name] ? it is [value_pricerange] and has [value_stars] stars . "}) +
          (booking ? s.pick({"shall i book a room ?", "would you like me to book it ?"})
                   : s.pick({"is there anything else you need ?", "what else can i do for you ?"})));
  if (booking) {
    booking_exchange(s,
                     s.pick({"yes please . book it for {people} people for {stay} nights starting {day} .",
                             "please book it for {people} people and {stay} nights from {day} ."}),
                     s.pick({"your room is booked . the reference number is [hotel_reference] .",
                             "booking was successful for [value_count] people . reference number is "
                             "[hotel_reference] ."}),
                     s.pick({"i am sorry , the hotel is fully booked that day . would you like to try another "
                             "day ?",
                             "unfortunately that booking was unsuccessful . shall i try another day ?"}),
                     s.pick({"how about {alt_day} instead ?", "can you try {alt_day} ?"}));
  } else {
    ask_requestables(s, Domain::Hotel, kAskNames);
  }
  s.close(kThanks, kBye);
  return s.take();
}

GoalSegment attraction_goal(const KnowledgeBase &kb, Rng &rng) {
  const auto &rows = kb.table(Domain::Attraction);
  const Entity &e = rows[rng.below(rows.size())];
  GoalSegment s;
  s.domain = Domain::Attraction;
  s.constraints = {{"type", e.at("type")}};
  if (rng.bernoulli(0.6)) s.constraints["area"] = e.at("area");
  s.requestables = sample_requests(rng, {"address", "phone", "postcode", "price"});
  return s;
}

std::vector<Turn> attraction_dialog(Script &s) {
  const bool has_area = s.segment().constraints.contains("area");
  if (has_area && s.chance(0.5)) {
    s.user_informs(s.pick({"i am looking for a {type} in the {area} .", "can you recommend a {type} in the {area} ?"}),
                   {"type", "area"});
  } else {
    s.user_informs(s.pick({"i am looking for a {type} to visit .", "can you recommend a {type} ?"}), {"type"});
    if (s.count() > 1) {
      s.agent(s.pick({"there are several [value_type] attractions . what area would you like ?",
                      "i have a few of those . is there an area you prefer ?"}));
      if (has_area) {
        s.user_informs(s.pick({"the {area} please .", "i would like it to be in the {area} ."}), {"area"});
      } else {
        s.user(s.pick({"any area is fine .", "i do not mind about the area ."}));
      }
    }
  }
  s.agent(s.pick({"[attraction_name] is a [value_type] in the [value_area] . would you like more information ?",
                  "i recommend [attraction_name] in the [value_area] . what else would you like to know ?"}));
  ask_requestables(s, Domain::Attraction, {{"address", "address"},
                                           {"phone", "phone number"},
                                           {"postcode", "postcode"},
                                           {"price", "entrance fee"}});
  s.close(kThanks, kBye);
  return s.take();
}

std::vector<Turn> police_dialog(Script &s) {
  s.user(s.pick({"i need to find the nearest police station .", "i was robbed . where is the police station ?",
                 "can you help me find a police station ?"}));
  s.agent(s.pick({"[police_name] is located at [police_address] .",
                  "the nearest police station is [police_name] at [police_address] ."}));
  ask_requestables(s, Domain::Police, kAskNames);
  s.close(kThanks, kBye);
  return s.take();
}

GoalSegment police_goal(Rng &rng) {
  GoalSegment s;
  s.domain = Domain::Police;
  s.requestables = sample_requests(rng, {"phone", "postcode"});
  return s;
}

GoalSegment hospital_goal(const KnowledgeBase &kb, Rng &rng) {
  const auto &rows = kb.table(Domain::Hospital);
  GoalSegment s;
  s.domain = Domain::Hospital;
  s.constraints = {{"department", rows[rng.below(rows.size())].at("department")}};
  s.requestables = sample_requests(rng, {"address", "phone", "postcode"});
  return s;
}

std::vector<Turn> hospital_dialog(Script &s) {
  s.user_informs(s.pick({"i am looking for the hospital . i need the {department} department .",
                         "where can i find the {department} department ?"}),
                 {"department"});
  s.agent(s.pick({"the [value_department] department is at [hospital_name] . what would you like to know ?",
                  "[hospital_name] has a [value_department] department . how can i help ?"}));
  s.user(s.pick({"can i get the phone number , address and postcode please ?", "what are the contact details ?"}));
  const std::string answer = s.request_answer({{"address", "the address is [hospital_address]"},
                                               {"phone", "the phone number is [value_phone]"},
                                               {"postcode", "the postcode is [value_postcode]"}});
  s.agent(answer + " . is there anything else ?");
  s.close(kThanks, kBye);
  return s.take();
}

GoalSegment taxi_goal(Rng &rng) {
  GoalSegment s;
  s.domain = Domain::Taxi;
  const std::string from = kTaxiPlaces[rng.below(kTaxiPlaces.size())];
  s.constraints = {{"departure", from}, {"destination", other(rng, kTaxiPlaces, from)}};
  s.booking = {{"leave_at", clock(7 * 60 + 15 * static_cast<int>(rng.below(56)))}};
  s.requestables = {"name", "phone", "reference"};
  return s;
}

std::vector<Turn> taxi_dialog(Script &s) {
  if (s.chance(0.5)) {
    s.user_informs(s.pick({"i need a taxi from {departure} to {destination} after {leave_at} .",
                           "can you book a taxi to {destination} from {departure} ? i want to leave after "
                           "{leave_at} ."}),
                   {"departure", "destination", "leave_at"});
  } else {
    s.user_informs(s.pick({"i need a taxi from {departure} to {destination} .",
                           "can you book a taxi to {destination} from {departure} ?"}),
                   {"departure", "destination"});
    s.agent(s.pick({"what time would you like to leave ?", "sure , when would you like to leave ?"}));
    s.user_informs(s.pick({"i want to leave after {leave_at} .", "after {leave_at} please ."}), {"leave_at"});
  }
  s.agent(s.pick({"i have booked a [taxi_name] for you . the contact number is [value_phone] and the "
                  "reference is [taxi_reference] .",
                  "booking completed ! your car is a [taxi_name] . contact number [value_phone] . reference "
                  "[taxi_reference] ."}),
          s.book_now());
  s.close(kThanks, kBye);
  return s.take();
}

GoalSegment train_goal(const KnowledgeBase &kb, Rng &rng) {
  const auto &rows = kb.table(Domain::Train);
  const Entity &e = rows[rng.below(rows.size())];
  GoalSegment s;
  s.domain = Domain::Train;
  s.constraints = {{"departure", e.at("departure")}, {"destination", e.at("destination")}, {"day", e.at("day")}};
  if (rng.bernoulli(0.5)) {
    const int arrive = *parse_clock(e.at("arrive_by"));
    s.constraints["arrive_by"] = clock((arrive + 14) / 15 * 15);
  } else {
    const int leave = *parse_clock(e.at("leave_at"));
    s.constraints["leave_at"] = clock(leave / 15 * 15);
  }
  if (rng.bernoulli(0.7)) {
    s.booking = {{"people", std::to_string(1 + rng.below(8))}};
    s.requestables = {"reference"};
  } else {
    s.requestables = sample_requests(rng, {"price", "duration"});
  }
  return s;
}

std::vector<Turn> train_dialog(Script &s, bool gold) {
  const GoalSegment &g = s.segment();
  const int opening = gold ? 0 : static_cast<int>(s.pick({"0", "1", "2"})[0] - '0');
  bool have_route = false;
  if (opening == 0) {
    s.user_informs(s.pick({"i need to find a train for {day} .", "i need a train on {day} ."}), {"day"});
    s.agent(s.pick({"i have many trains that depart [value_day] . where will you be departing from and where is "
                    "your destination ?",
                    "there are lots of trains on [value_day] . where are you traveling from and to ?"}));
  } else if (opening == 1) {
    s.user_informs(s.pick({"i am looking for a train to {destination} .", "i need a train going to {destination} ."}),
                   {"destination"});
    s.agent(s.pick({"there are many trains available . where will you be departing from ?",
                    "where will you be leaving from ?"}));
    s.user_informs(s.pick({"i will be departing from {departure} on {day} .", "from {departure} on {day} please ."}),
                   {"departure", "day"});
    have_route = true;
  } else {
    s.user_informs(s.pick({"i need a train from {departure} to {destination} on {day} .",
                           "i am looking for a train leaving {departure} for {destination} on {day} ."}),
                   {"departure", "destination", "day"});
    have_route = true;
  }
  if (!have_route) {
    s.user_informs(s.pick({"i will be departing from {departure} and traveling to {destination} .",
                           "from {departure} to {destination} ."}),
                   {"departure", "destination"});
  }
  s.agent(s.pick({"okay , and what time do you want to leave after or arrive by ?",
                  "what time would you like to travel ?"}));
  if (g.constraints.contains("arrive_by")) {
    s.user_informs(s.pick({"i need to arrive by {arrive_by} .", "i want to get there by {arrive_by} ."}), {"arrive_by"});
  } else {
    s.user_informs(s.pick({"i want to leave after {leave_at} .", "i would like to leave after {leave_at} ."}),
                   {"leave_at"});
  }
  const bool booking = !g.booking.empty();
  s.agent(s.pick({"how about [train_name] that leaves at [value_leave_at] ? ",
                  "[train_name] leaves at [value_leave_at] and arrives by [value_arrive_by] . "}) +
          (booking ? s.pick({"do you want me to book any tickets ?", "shall i book it ?"})
                   : s.pick({"is there anything else you need ?", "can i help with anything else ?"})));
  if (booking) {
    s.user_informs(s.pick({"yes please . i need it to be booked for {people} people .",
                           "that would work , can you book it for {people} people ?"}),
                   {"people"});
    s.agent(s.pick({"booking was successful , the total fee is [value_price] gbp payable at the station . "
                    "reference number is : [train_reference] .",
                    "i have booked [value_count] tickets on that train . reference number is [train_reference] ."}),
            s.book_now());
  } else {
    ask_requestables(s, Domain::Train, kAskNames);
  }
  s.close(kThanks, {"you are welcome . enjoy your trip !",
                    "you're welcome , thank you for calling . have a great day ."});
  return s.take();
}

}  // namespace

ToyWorld make_toy_world(std::uint64_t seed, int per_domain) {
  if (per_domain < 1) throw InvalidArgument("per_domain must be positive");
  ToyWorld w{toy_kb(), toy_templates(), Corpus{}};
  for (Domain d : kAllDomains) {
    const std::string dn(domain_name(d));
    for (int i = 0; i < per_domain; ++i) {
      const std::uint64_t dseed = derive_seed(seed, static_cast<std::uint64_t>(d) * 1000 + static_cast<std::uint64_t>(i));
      Rng rng(dseed);
      char num[16];
      std::snprintf(num, sizeof num, "%02d", i);
      Goal goal;
      goal.goal_id = dn + "-" + num;
      GoalSegment seg;
      switch (d) {
        case Domain::Restaurant: seg = restaurant_goal(w.kb, rng); break;
        case Domain::Hotel: seg = hotel_goal(w.kb, rng); break;
        case Domain::Attraction: seg = attraction_goal(w.kb, rng); break;
        case Domain::Police: seg = police_goal(rng); break;
        case Domain::Hospital: seg = hospital_goal(w.kb, rng); break;
        case Domain::Taxi: seg = taxi_goal(rng); break;
        case Domain::Train: seg = train_goal(w.kb, rng); break;
      }
      if (i == 0 && d == Domain::Train) goal = toy_train_goal(), seg = goal.segments[0];
      if (i == 0 && d == Domain::Restaurant) goal = toy_restaurant_goal(), seg = goal.segments[0];
      goal.segments = {seg};
      Script s(w.kb, goal.segments[0], rng, dseed);
      std::vector<Turn> turns;
      switch (d) {
        case Domain::Restaurant: turns = restaurant_dialog(s); break;
        case Domain::Hotel: turns = hotel_dialog(s); break;
        case Domain::Attraction: turns = attraction_dialog(s); break;
        case Domain::Police: turns = police_dialog(s); break;
        case Domain::Hospital: turns = hospital_dialog(s); break;
        case Domain::Taxi: turns = taxi_dialog(s); break;
        case Domain::Train: turns = train_dialog(s, i == 0); break;
      }
      Dialog dialog{dn + "-" + num + ".json", goal.goal_id, std::move(turns), true, Provenance::Human};
      w.corpus.goals[goal.goal_id] = goal;
      w.corpus.dialogs.push_back(std::move(dialog));
    }
  }
  validate_corpus(w.corpus);
  return w;
}

void write_toy_world(const ToyWorld &world, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir / "goals");
  save_kb(world.kb, dir / "kb");
  save_templates(world.templates, dir / "goals");
  save_corpus(world.corpus, dir / "corpus.jsonl", dir / "goals" / "goals.json", "source=toy-data");
}

}  // namespace dialoforge
