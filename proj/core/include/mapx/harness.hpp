#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mapx/explorer.hpp"
#include "mapx/scenario.hpp"

namespace mapx {

struct EpisodeSummary {
  double traversal_cost = 0.0;  // attempts, failed ones included
  int tasks_drawn = 0;
  int tasks_completed = 0;
  int readings = 0;
  int regenerations = 0;
  double simulated_minutes = 0.0;
  bool true_map_in_set = false;
  double true_map_mass = 0.0;
  double nota = 0.0;
};

// Ordered log records, one JSON object per line, plus the final metrics.
struct EpisodeLog {
  std::vector<std::string> records;
  EpisodeSummary summary;
  std::vector<double> final_probs;

  std::string to_jsonl() const;
};

// Draws a world in which all task endpoints are mutually reachable (unless
// the scenario fixes one). Throws ConfigError when none is found.
MapHypothesis scenario_world(const Scenario& scenario);

EpisodeLog run_episode(const Scenario& scenario);

struct Table1Config {
  GridSpec grid{4, 4};
  std::vector<int> hypothesis_sizes{10, 20, 30};
  std::vector<int> exploration_lengths{4, 6, 8, 10};
  int runs = 10;
  std::uint64_t seed = 1;
  NoiseModel noise;
  bool timing = false;
};

struct Table1Row {
  int hypothesis_size = 0;
  int exploration_length = 0;
  std::optional<double> update_time_ms;  // only measured when timing is on
  double largest_clique_cost = 0.0;      // mean over runs
};

// Explored intersections are a prefix of a random connected visiting order
// shared by every |H| within a run. Each is fully scanned and its junction
// type instantiated.
std::vector<Table1Row> benchmark_table1(const Table1Config& config);

// Largest clique cost of the multiply-connected network for one cell.
std::uint64_t table1_clique_cost(const GridSpec& grid, const std::vector<MapHypothesis>& maps,
                                 const MapHypothesis& world,
                                 const std::vector<Intersection>& explored,
                                 const NoiseModel& noise, std::uint64_t seed);

// Random connected visiting order of all intersections from a random start.
std::vector<Intersection> exploration_order(const GridSpec& grid, std::uint64_t seed);

std::string table1_csv(const std::vector<Table1Row>& rows);

struct MethodSummary {
  NavigationMethod method = NavigationMethod::WeightedPath;
  int trials = 0;
  double mean_cost = 0.0;
  double cost_deviation = 0.0;
  double reached_fraction = 0.0;
  double mean_edges_learned = 0.0;
  double estimated_cost = 0.0;  // Monte Carlo estimate under the prior belief
};

// Every method faces the same worlds and tasks: trial t samples its world and
// task from the scenario seed and t. Fresh knowledge each trial.
std::vector<MethodSummary> compare_methods(const Scenario& scenario,
                                           const std::vector<NavigationMethod>& methods,
                                           int trials, int rollouts = 20);

std::string methods_csv(const std::vector<MethodSummary>& rows);

}  // namespace mapx
