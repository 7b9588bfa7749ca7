#include "mapx/explorer.hpp"

#include <algorithm>
#include <cmath>

#include "mapx/errors.hpp"

namespace mapx {

namespace {

struct Label {
  double value = 0.0;
  std::vector<int> path;  // grid indices
};

bool better(const Label& a, const Label& b) {
  if (std::abs(a.value - b.value) > 1e-12) return a.value > b.value;
  if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
  return a.path < b.path;
}

}  // namespace

EdgeKnowledge unknown_edges(const GridSpec& grid) {
  return EdgeKnowledge(static_cast<std::size_t>(grid.edge_count()), EdgeState::Unknown);
}

EdgeKnowledge edge_knowledge(const GridSpec& grid, const std::vector<SensorReading>& readings) {
  EdgeKnowledge k = unknown_edges(grid);
  for (const auto& r : readings) {
    if (!r.certain || r.detector.feature != Feature::Opening || !r.detector.wedge.cardinal()) {
      continue;
    }
    if (auto id = grid.edge_id(r.location, r.detector.wedge.direction())) {
      k[static_cast<std::size_t>(*id)] = r.result ? EdgeState::Present : EdgeState::Absent;
    }
  }
  return k;
}

std::string_view method_name(NavigationMethod m) {
  switch (m) {
    case NavigationMethod::WeightedPath: return "weighted_path";
    case NavigationMethod::ShortestIgnoringUnknown: return "shortest_ignoring_unknown";
    case NavigationMethod::AvoidKnown: return "avoid_known";
    case NavigationMethod::RandomWalk: return "random_walk";
  }
  return "?";
}

std::optional<NavigationMethod> parse_method(std::string_view name) {
  for (NavigationMethod m : kNavigationMethods) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view outcome_name(NavigationOutcome o) {
  switch (o) {
    case NavigationOutcome::Reached: return "reached";
    case NavigationOutcome::Blocked: return "blocked";
    case NavigationOutcome::StepBoundExceeded: return "step_bound_exceeded";
  }
  return "?";
}

double edge_weight(int edge, const EdgeKnowledge& knowledge,
                   const std::vector<MapHypothesis>& maps, NavigationMethod method) {
  switch (knowledge[static_cast<std::size_t>(edge)]) {
    case EdgeState::Present:
      return method == NavigationMethod::AvoidKnown ? 0.5 : 1.0;
    case EdgeState::Absent:
      return 0.0;
    case EdgeState::Unknown:
      break;
  }
  if (method == NavigationMethod::ShortestIgnoringUnknown) return 1.0;
  int m = 0;
  for (const auto& map : maps) m += map.has_edge(edge) ? 1 : 0;
  return (m + 1.0) / (static_cast<double>(maps.size()) + 1.0);
}

double path_value(const GridSpec& grid, const std::vector<Intersection>& path,
                  const EdgeKnowledge& knowledge, const std::vector<MapHypothesis>& maps,
                  NavigationMethod method) {
  double v = 1.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    auto id = grid.edge_between(path[i - 1], path[i]);
    if (!id) throw InvalidArgument("path is not contiguous");
    v *= edge_weight(*id, knowledge, maps, method);
  }
  return v;
}

std::optional<RankedPath> best_path(const GridSpec& grid, Intersection start, Intersection goal,
                                    const EdgeKnowledge& knowledge,
                                    const std::vector<MapHypothesis>& maps,
                                    NavigationMethod method) {
  if (!grid.contains(start) || !grid.contains(goal)) throw InvalidArgument("endpoint outside grid");
  if (method == NavigationMethod::RandomWalk) throw InvalidArgument("random_walk has no path order");
  const auto n = static_cast<std::size_t>(grid.intersection_count());
  std::vector<std::optional<Label>> labels(n);
  std::vector<bool> settled(n, false);
  labels[static_cast<std::size_t>(grid.index(start))] = Label{1.0, {grid.index(start)}};

  // Weights never exceed 1 and every edge adds length, so extending a path
  // never improves its key; label-setting search is exact.
  while (true) {
    int u = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (settled[i] || !labels[i]) continue;
      if (u < 0 || better(*labels[i], *labels[static_cast<std::size_t>(u)])) u = static_cast<int>(i);
    }
    if (u < 0) return std::nullopt;
    settled[static_cast<std::size_t>(u)] = true;
    const Label& lu = *labels[static_cast<std::size_t>(u)];
    const Intersection pu = grid.at(u);
    if (pu == goal) {
      RankedPath out;
      out.value = lu.value;
      for (int i : lu.path) out.nodes.push_back(grid.at(i));
      return out;
    }
    for (Direction d : kDirections) {
      auto id = grid.edge_id(pu, d);
      if (!id) continue;
      const double w = edge_weight(*id, knowledge, maps, method);
      if (w <= 0.0) continue;
      const int v = grid.index(*grid.neighbor(pu, d));
      if (settled[static_cast<std::size_t>(v)]) continue;
      Label cand{lu.value * w, lu.path};
      cand.path.push_back(v);
      auto& lv = labels[static_cast<std::size_t>(v)];
      if (!lv || better(cand, *lv)) lv = std::move(cand);
    }
  }
}

std::optional<Direction> best_step(const GridSpec& grid, Intersection position, Intersection goal,
                                   const EdgeKnowledge& knowledge,
                                   const std::vector<MapHypothesis>& maps,
                                   NavigationMethod method) {
  if (position == goal) throw InvalidArgument("already at the goal");
  auto path = best_path(grid, position, goal, knowledge, maps, method);
  if (!path) return std::nullopt;
  const Intersection next = path->nodes[1];
  for (Direction d : kDirections) {
    if (grid.neighbor(position, d) == next) return d;
  }
  return std::nullopt;
}

std::optional<Direction> choose_step(NavigationMethod method, const GridSpec& grid,
                                     Intersection position, Intersection goal,
                                     const EdgeKnowledge& knowledge,
                                     const std::vector<MapHypothesis>& maps, Rng& rng) {
  if (method != NavigationMethod::RandomWalk) {
    return best_step(grid, position, goal, knowledge, maps, method);
  }
  std::vector<Direction> open;
  for (Direction d : kDirections) {
    auto id = grid.edge_id(position, d);
    if (id && knowledge[static_cast<std::size_t>(*id)] != EdgeState::Absent) open.push_back(d);
  }
  if (open.empty()) return std::nullopt;
  return open[rng.below(open.size())];
}

NavigationResult navigate(NavigationMethod method, Intersection start, Intersection goal,
                          const MapHypothesis& world, EdgeKnowledge knowledge,
                          std::optional<BeliefState> belief, Rng& rng,
                          const std::vector<MapHypothesis>& maps, int first_step) {
  const GridSpec& grid = world.grid();
  if (!grid.contains(start) || !grid.contains(goal)) throw InvalidArgument("endpoint outside grid");
  if (knowledge.size() != static_cast<std::size_t>(grid.edge_count())) {
    throw InvalidArgument("knowledge has the wrong edge count");
  }
  NavigationResult result;
  result.knowledge = std::move(knowledge);
  result.belief = std::move(belief);
  result.position = start;
  const int bound = step_bound(grid);

  while (result.position != goal) {
    if (static_cast<int>(result.trajectory.size()) >= bound) {
      result.outcome = NavigationOutcome::StepBoundExceeded;
      return result;
    }
    const Intersection pos = result.position;
    const auto& weighting = result.belief ? result.belief->hypotheses().maps : maps;
    const auto dir = choose_step(method, grid, pos, goal, result.knowledge, weighting, rng);
    if (!dir) {
      result.outcome = NavigationOutcome::Blocked;
      return result;
    }
    const int id = *grid.edge_id(pos, *dir);
    const bool success = world.has_edge(id);
    const Intersection next = *grid.neighbor(pos, *dir);
    auto& state = result.knowledge[static_cast<std::size_t>(id)];
    if (state == EdgeState::Unknown) ++result.edges_learned;
    state = success ? EdgeState::Present : EdgeState::Absent;
    const int step = first_step + static_cast<int>(result.trajectory.size());
    result.trajectory.push_back({pos, next, success});
    if (result.belief) {
      for (const auto& r : traversal_readings(grid, pos, *dir, success, step)) {
        result.belief = update(*result.belief, r);
      }
    }
    if (success) result.position = next;
  }
  result.outcome = NavigationOutcome::Reached;
  return result;
}

CostEstimate estimate_method_cost(NavigationMethod method, const BeliefState& belief,
                                  const TaskSpec& task, int rollouts, Rng& rng) {
  if (rollouts < 1) throw InvalidArgument("rollouts must be at least 1");
  const GridSpec& grid = belief.grid();
  const auto& maps = belief.hypotheses().maps;
  const auto& probs = belief.probs();
  const EdgeKnowledge known = edge_knowledge(grid, belief.evidence());
  const EdgeConstraints constraints = evidence_constraints(grid, belief.evidence());

  std::vector<double> costs;
  double reached = 0.0;
  double learned = 0.0;
  for (int r = 0; r < rollouts; ++r) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::optional<MapHypothesis> world;
    for (std::size_t j = 0; j < maps.size(); ++j) {
      acc += probs[j];
      if (u < acc) {
        world = maps[j];
        break;
      }
    }
    const std::uint64_t world_seed = rng.next();
    if (!world) {
      try {
        world = sample_map(grid, world_seed, true, constraints);
      } catch (const NoConsistentMap&) {
        world = maps.empty() ? sample_map(grid, world_seed, true)
                             : maps[static_cast<std::size_t>(belief.map_estimate())];
      }
    }
    Rng walk(rng.next());
    const auto res = navigate(method, task.origin, task.destination, *world, known, std::nullopt,
                              walk, maps);
    costs.push_back(res.cost());
    reached += res.outcome == NavigationOutcome::Reached ? 1.0 : 0.0;
    learned += res.edges_learned;
  }
  CostEstimate est;
  for (double c : costs) est.mean += c;
  est.mean /= rollouts;
  double var = 0.0;
  for (double c : costs) var += (c - est.mean) * (c - est.mean);
  est.deviation = std::sqrt(var / rollouts);
  est.reached_fraction = reached / rollouts;
  est.mean_edges_learned = learned / rollouts;
  return est;
}

}  // namespace mapx
