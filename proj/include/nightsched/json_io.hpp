// JSON interchange formats for instances and schedules. These are the wire
// contract shared by every CLI subcommand.
#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "nightsched/core.hpp"

namespace nightsched {

// Insertion-ordered JSON keeps emitted documents stable across runs.
using njson = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline njson instance_to_json(const Instance& inst) {
  njson j;
  j["nights"] = inst.nights;
  j["probabilities"] = inst.probabilities;
  njson obs = njson::array();
  for (const auto& o : inst.observations) {
    obs.push_back({{"id", o.id},
                   {"release", o.release},
                   {"deadline", o.deadline},
                   {"processing", o.processing},
                   {"gain", o.gain}});
  }
  j["observations"] = std::move(obs);
  return j;
}

inline njson schedule_to_json(const Schedule& sched) {
  njson nights = njson::array();
  for (const auto& plan : sched.nights) {
    njson placements = njson::array();
    for (const auto& pl : plan.placements)
      placements.push_back({{"id", pl.id}, {"start", pl.start}});
    nights.push_back(std::move(placements));
  }
  return njson{{"nights", std::move(nights)}};
}

inline Instance instance_from_json(const njson& j) {
  try {
    Instance inst;
    inst.nights = j.at("nights").get<int>();
    inst.probabilities = j.at("probabilities").get<std::vector<double>>();
    for (const auto& o : j.at("observations")) {
      Observation obs;
      obs.id = o.at("id").get<std::string>();
      obs.release = o.at("release").get<int>();
      obs.deadline = o.at("deadline").get<int>();
      obs.processing = o.at("processing").get<int>();
      obs.gain = o.at("gain").get<int>();
      inst.observations.push_back(std::move(obs));
    }
    return inst;
  } catch (const njson::exception& e) {
    throw ParseError(std::string("malformed instance document: ") + e.what());
  }
}

inline Schedule schedule_from_json(const njson& j) {
  try {
    Schedule sched;
    for (const auto& night : j.at("nights")) {
      NightPlan plan;
      for (const auto& pl : night)
        plan.placements.push_back(
            {pl.at("id").get<std::string>(), pl.at("start").get<int>()});
      sched.nights.push_back(std::move(plan));
    }
    return sched;
  } catch (const njson::exception& e) {
    throw ParseError(std::string("malformed schedule document: ") + e.what());
  }
}

inline Instance parse_instance_text(const std::string& text) {
  njson j;
  try {
    j = njson::parse(text);
  } catch (const njson::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return instance_from_json(j);
}

}  // namespace nightsched
