#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mapx/belief_network.hpp"
#include "mapx/decision.hpp"
#include "mapx/explorer.hpp"
#include "mapx/hierarchy.hpp"
#include "mapx/sensing.hpp"
#include "mapx/world_model.hpp"

namespace mapx {

// Simulated wall time per action, in minutes.
struct TimeScale {
  double traversal_minutes = 4.0;
  double sensing_minutes = 0.75;
};

struct Scenario {
  GridSpec grid{3, 3};
  std::uint64_t seed = 1;
  int hypotheses = 10;
  NoiseModel noise;
  std::vector<TaskSpec> tasks;
  int task_draws = 0;               // tasks executed per episode
  NetworkStructure structure = NetworkStructure::Singly;
  bool hierarchy = false;
  double descend_threshold = kDefaultDescendThreshold;
  NavigationMethod method = NavigationMethod::WeightedPath;
  int proposal_detectors = 2;
  TimeScale time_scale;
  std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
  std::optional<MapHypothesis> world;  // sampled from the seed when absent

  // Throws ConfigError.
  void validate() const;
};

// Strict JSON schema; unknown keys and out-of-range values are ConfigError.
Scenario parse_scenario(std::string_view json_text);
std::string scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);

// {"nx": .., "ny": .., "edges": [[x, y, "N"|"E"], ...]}
std::string map_to_json(const MapHypothesis& m);
MapHypothesis parse_map(std::string_view json_text);

// One-shot posterior query.
struct InferenceQuery {
  GridSpec grid{2, 2};
  NoiseModel noise;
  NetworkStructure structure = NetworkStructure::Singly;
  std::vector<MapHypothesis> maps;  // when empty, `hypotheses` maps are drawn from `seed`
  int hypotheses = 5;
  std::uint64_t seed = 1;
  std::vector<SensorReading> readings;
};

InferenceQuery parse_inference_query(std::string_view json_text);

// Returns the posterior as a JSON document (maps, probabilities, NOTA).
std::string infer(const InferenceQuery& query);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace mapx
