#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "mapx/belief.hpp"
#include "mapx/decision.hpp"
#include "mapx/rng.hpp"
#include "mapx/world_model.hpp"

namespace mapx {

// Per-edge knowledge: Present/Absent once observed with certainty.
using EdgeKnowledge = EdgeConstraints;

EdgeKnowledge unknown_edges(const GridSpec& grid);

// Knowledge implied by certain (traversal) readings only.
EdgeKnowledge edge_knowledge(const GridSpec& grid, const std::vector<SensorReading>& readings);

enum class NavigationMethod : std::uint8_t {
  WeightedPath,
  ShortestIgnoringUnknown,
  AvoidKnown,
  RandomWalk,
};

inline constexpr NavigationMethod kNavigationMethods[] = {
    NavigationMethod::WeightedPath, NavigationMethod::ShortestIgnoringUnknown,
    NavigationMethod::AvoidKnown, NavigationMethod::RandomWalk};

std::string_view method_name(NavigationMethod m);
std::optional<NavigationMethod> parse_method(std::string_view name);

// Known present -> 1, known absent -> 0, unknown -> (m+1)/(|H|+1) with m the
// number of maps containing the edge. The method variants change the known
// present weight (avoid_known: 0.5) or the unknown weight (1 when ignoring
// unknown edges).
double edge_weight(int edge, const EdgeKnowledge& knowledge,
                   const std::vector<MapHypothesis>& maps,
                   NavigationMethod method = NavigationMethod::WeightedPath);

// Product of the edge weights along a node path.
double path_value(const GridSpec& grid, const std::vector<Intersection>& path,
                  const EdgeKnowledge& knowledge, const std::vector<MapHypothesis>& maps,
                  NavigationMethod method = NavigationMethod::WeightedPath);

struct RankedPath {
  std::vector<Intersection> nodes;  // from start to goal inclusive
  double value = 0.0;
};

// Highest-value simple path, then the shortest, then the lexicographically
// smallest node sequence. Zero-weight edges are never used; nullopt means
// Blocked. Not defined for random_walk.
std::optional<RankedPath> best_path(const GridSpec& grid, Intersection start, Intersection goal,
                                    const EdgeKnowledge& knowledge,
                                    const std::vector<MapHypothesis>& maps,
                                    NavigationMethod method = NavigationMethod::WeightedPath);

// Direction of the first edge of best_path; nullopt means Blocked.
std::optional<Direction> best_step(const GridSpec& grid, Intersection position, Intersection goal,
                                   const EdgeKnowledge& knowledge,
                                   const std::vector<MapHypothesis>& maps,
                                   NavigationMethod method = NavigationMethod::WeightedPath);

// Next move of the method from `position`; nullopt means Blocked. random_walk
// draws uniformly among incident edges not known to be absent.
std::optional<Direction> choose_step(NavigationMethod method, const GridSpec& grid,
                                     Intersection position, Intersection goal,
                                     const EdgeKnowledge& knowledge,
                                     const std::vector<MapHypothesis>& maps, Rng& rng);

struct TraversalAttempt {
  Intersection from;
  Intersection to;
  bool success = false;
};

enum class NavigationOutcome : std::uint8_t { Reached, Blocked, StepBoundExceeded };

std::string_view outcome_name(NavigationOutcome o);

struct NavigationResult {
  NavigationOutcome outcome = NavigationOutcome::Reached;
  std::vector<TraversalAttempt> trajectory;
  EdgeKnowledge knowledge;
  std::optional<BeliefState> belief;
  Intersection position;
  int edges_learned = 0;

  // One time unit per attempt, failed or not.
  double cost() const { return static_cast<double>(trajectory.size()); }
};

inline int step_bound(const GridSpec& grid) { return 4 * grid.edge_count(); }

// Walks from start toward goal in `world`. Each attempt reveals the edge and,
// when a belief is given, adds the two certain opening readings to it. The
// weighting maps are those of the belief, or `maps` when no belief is given.
NavigationResult navigate(NavigationMethod method, Intersection start, Intersection goal,
                          const MapHypothesis& world, EdgeKnowledge knowledge,
                          std::optional<BeliefState> belief, Rng& rng,
                          const std::vector<MapHypothesis>& maps = {}, int first_step = 0);

struct CostEstimate {
  double mean = 0.0;
  double deviation = 0.0;  // population standard deviation
  double reached_fraction = 0.0;
  double mean_edges_learned = 0.0;
};

// Monte Carlo over worlds drawn from the belief. NOTA draws a density-weighted
// map consistent with the evidence.
CostEstimate estimate_method_cost(NavigationMethod method, const BeliefState& belief,
                                  const TaskSpec& task, int rollouts, Rng& rng);

}  // namespace mapx
