#pragma once

// JSON form of state spaces and rough sets:
//
//   {
//     "states":    [{"label": "a", "payoff": -1.0}, ...],
//     "lower":     [0, 1, 0],          // membership mask, one entry per state
//     "upper":     [1, 1, 0],
//     "partition": [["a", "b"], ["c"]], // optional, with "target"
//     "target":    [1, 0, 0]
//   }

#include <json.hpp>

#include "vaguekit/roughset.hpp"

namespace vaguekit::rough {

inline nlohmann::json space_to_json(const StateSpace& space) {
  nlohmann::json states = nlohmann::json::array();
  for (const auto& s : space.states()) states.push_back({{"label", s.label}, {"payoff", s.payoff}});
  return states;
}

inline nlohmann::json mask_to_json(const CrispSet& set) {
  nlohmann::json m = nlohmann::json::array();
  for (std::size_t i = 0; i < set.space()->size(); ++i) m.push_back(set.contains(i) ? 1 : 0);
  return m;
}

inline nlohmann::json to_json(const RoughSet& rs) {
  return {{"states", space_to_json(*rs.space())}, {"lower", mask_to_json(rs.lower())}, {"upper", mask_to_json(rs.upper())}};
}

inline SpacePtr space_from_json(const nlohmann::json& j) {
  if (!j.contains("states") || !j["states"].is_array()) throw ParseError("missing \"states\" array", 0);
  std::vector<State> states;
  for (const auto& s : j["states"]) {
    if (s.is_number()) {
      double p = s.get<double>();
      states.push_back({StateSpace::format_payoff(p), p});
    } else {
      if (!s.contains("label") || !s.contains("payoff")) throw ParseError("each state needs \"label\" and \"payoff\"", 0);
      states.push_back({s["label"].get<std::string>(), s["payoff"].get<double>()});
    }
  }
  return StateSpace::make(std::move(states));
}

inline CrispSet mask_from_json(const SpacePtr& space, const nlohmann::json& j, const char* key) {
  if (!j.is_array()) throw ParseError(std::string("\"") + key + "\" must be an array", 0);
  if (j.empty()) return CrispSet::empty(space);
  if (j.front().is_string()) return CrispSet::of_labels(space, j.get<std::vector<std::string>>());
  if (j.size() != space->size())
    throw StructuralError(std::string("\"") + key + "\" mask has " + std::to_string(j.size()) + " entries for " +
                          std::to_string(space->size()) + " states");
  Mask m = 0;
  for (std::size_t i = 0; i < j.size(); ++i)
    if (j[i].get<int>() != 0) m |= Mask{1} << i;
  return CrispSet(space, m);
}

inline RoughSet rough_from_json(const nlohmann::json& j, const SpacePtr& space) {
  return RoughSet(mask_from_json(space, j.at("lower"), "lower"), mask_from_json(space, j.at("upper"), "upper"));
}

inline RoughSet rough_from_json(const nlohmann::json& j) { return rough_from_json(j, space_from_json(j)); }

inline Partition partition_from_json(const SpacePtr& space, const nlohmann::json& j) {
  return Partition::of_labels(space, j.get<std::vector<std::vector<std::string>>>());
}

}  // namespace vaguekit::rough
