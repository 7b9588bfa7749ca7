#pragma once

#include <string_view>
#include <vector>

#include "mapx/belief.hpp"
#include "mapx/sensing.hpp"
#include "mapx/world_model.hpp"

namespace mapx {

// A point-to-point traversal class T_i with its expected count E(|T_i|).
struct TaskSpec {
  int id = 0;
  Intersection origin;
  Intersection destination;
  double expected_count = 0.0;
};

// Waypoints visited in order. A direct task is {origin, destination}; the
// detour T*' through a sensing location is {origin, location, destination}.
struct Route {
  std::vector<Intersection> waypoints;

  static Route direct(Intersection a, Intersection b) { return Route{{a, b}}; }
};

// Cost units are edge traversals times `traversal_cost`. Unreachable legs and
// the NOTA state cost the penalty bound B = 2 * nx * ny traversals.
struct DecisionModel {
  GridSpec grid;
  double traversal_cost = 1.0;

  double penalty() const {
    return 2.0 * grid.nx() * grid.ny() * traversal_cost;
  }
};

// Shortest-path cost of the route in plan ∩ truth, leg by leg.
double cost(const DecisionModel& model, const Route& route, const EdgeSet& plan,
            const EdgeSet& truth);
double cost(const DecisionModel& model, const TaskSpec& task, const MapHypothesis& plan,
            const MapHypothesis& truth);

// Cost(T_i, M_p, M_t) for every task, plan map and true map. Plan maps are the
// hypotheses followed by any extra plans (e.g. the current M*).
class CostTable {
 public:
  CostTable() = default;
  CostTable(int tasks, int plans, int truths);

  double at(int task, int plan, int truth) const;
  double& at(int task, int plan, int truth);
  int task_count() const { return tasks_; }
  int plan_count() const { return plans_; }
  int truth_count() const { return truths_; }

 private:
  int tasks_ = 0;
  int plans_ = 0;
  int truths_ = 0;
  std::vector<double> values_;
};

CostTable build_cost_table(const DecisionModel& model, const std::vector<TaskSpec>& tasks,
                           const std::vector<MapHypothesis>& maps,
                           const std::vector<EdgeSet>& extra_plans = {});

// Posterior over maps plus NOTA (last entry), as held by a BeliefState.
struct Posterior {
  const std::vector<MapHypothesis>& maps;
  const std::vector<double>& probs;

  // Most probable map; NOTA excluded, lowest index on ties.
  int map_estimate() const;
};

inline Posterior posterior_of(const BeliefState& b) {
  return Posterior{b.hypotheses().maps, b.probs()};
}

// Σ_i E(|T_i|) Cost(T_i, M_MAP, truth). `truth` < 0 selects NOTA, which
// costs B per expected task.
double futures(const DecisionModel& model, const std::vector<TaskSpec>& tasks,
               const Posterior& info, int truth);
double futures(const DecisionModel& model, const std::vector<TaskSpec>& tasks,
               const MapHypothesis& truth, const Posterior& info);

// Σ_j Pr(M_j|E) [Cost(T*, M*, M_j) + Futures(M_j, E)], NOTA included.
double ev_known_path(const DecisionModel& model, const std::vector<TaskSpec>& tasks,
                     const Route& route, const EdgeSet& plan, const Posterior& info);

// Perfect classification: the true world is known to the evaluator.
double ev_known_path_perfect(const DecisionModel& model, const std::vector<TaskSpec>& tasks,
                             const Route& route, const EdgeSet& plan,
                             const MapHypothesis& world, const Posterior& info);

// One exploratory sensing action: firing `detectors` at `location` while
// following `route` (T*'). likelihood[o][j] = Pr(O_o | M_j); the NOTA column
// is nota_likelihood[o].
struct SensingProposal {
  Intersection location;
  std::vector<Detector> detectors;
  std::vector<std::vector<bool>> outcomes;
  std::vector<std::vector<double>> likelihood;
  std::vector<double> nota_likelihood;
  Route route;

  // Throws OutcomesNotExhaustive unless every column sums to 1 within 1e-9.
  void validate(int map_count) const;
};

// Enumerates all 2^d result vectors of the detectors under the noise model.
SensingProposal make_proposal(const BeliefState& belief, Intersection location,
                              std::vector<Detector> detectors, Route route);

double ev_unknown_path(const DecisionModel& model, const std::vector<TaskSpec>& tasks,
                       const EdgeSet& plan, const Posterior& info,
                       const SensingProposal& proposal);

enum class PathChoice : std::uint8_t { Known, Unknown };

std::string_view path_choice_name(PathChoice c);

struct PathDecision {
  double ev_known = 0.0;
  double ev_unknown = 0.0;
  PathChoice choice = PathChoice::Known;
};

// Evaluates P_K (known_route in known_plan) against P_U (the proposal's route
// in unknown_plan); ties go to P_K.
PathDecision choose_path(const DecisionModel& model, const std::vector<TaskSpec>& tasks,
                         const Route& known_route, const EdgeSet& known_plan,
                         const EdgeSet& unknown_plan, const Posterior& info,
                         const SensingProposal& proposal);

}  // namespace mapx
