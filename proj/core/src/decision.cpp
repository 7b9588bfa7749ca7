#include "mapx/decision.hpp"

#include <cmath>

#include "mapx/errors.hpp"

namespace mapx {

namespace {

EdgeSet intersect(const EdgeSet& a, const EdgeSet& b) {
  EdgeSet out(a.size(), false);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] && b[i];
  return out;
}

double leg_cost(const DecisionModel& model, const EdgeSet& usable, Intersection a,
                Intersection b) {
  if (auto d = shortest_path(model.grid, usable, a, b)) return *d * model.traversal_cost;
  return model.penalty();
}

double total_expected_count(const std::vector<TaskSpec>& tasks) {
  double s = 0.0;
  for (const auto& t : tasks) s += t.expected_count;
  return s;
}

double route_cost_under(const DecisionModel& model, const std::vector<TaskSpec>& tasks,
                        const Route& route, const EdgeSet& plan, const Posterior& info,
                        const Posterior& future_info) {
  double ev = 0.0;
  const auto k = info.maps.size();
  for (std::size_t j = 0; j < k; ++j) {
    const double p = info.probs[j];
    if (p == 0.0) continue;
    ev += p * (cost(model, route, plan, info.maps[j].edges()) +
               futures(model, tasks, future_info, static_cast<int>(j)));
  }
  const double nota = info.probs[k];
  if (nota > 0.0) ev += nota * (model.penalty() + futures(model, tasks, future_info, -1));
  return ev;
}

}  // namespace

double cost(const DecisionModel& model, const Route& route, const EdgeSet& plan,
            const EdgeSet& truth) {
  if (plan.size() != truth.size()) throw InvalidArgument("plan and truth on different grids");
  const EdgeSet usable = intersect(plan, truth);
  double total = 0.0;
  for (std::size_t i = 1; i < route.waypoints.size(); ++i) {
    total += leg_cost(model, usable, route.waypoints[i - 1], route.waypoints[i]);
  }
  return total;
}

double cost(const DecisionModel& model, const TaskSpec& task, const MapHypothesis& plan,
            const MapHypothesis& truth) {
  return cost(model, Route::direct(task.origin, task.destination), plan.edges(), truth.edges());
}

CostTable::CostTable(int tasks, int plans, int truths)
    : tasks_(tasks), plans_(plans), truths_(truths),
      values_(static_cast<std::size_t>(tasks) * plans * truths, 0.0) {}

double CostTable::at(int task, int plan, int truth) const {
  return values_[(static_cast<std::size_t>(task) * plans_ + plan) * truths_ + truth];
}

double& CostTable::at(int task, int plan, int truth) {
  return values_[(static_cast<std::size_t>(task) * plans_ + plan) * truths_ + truth];
}

CostTable build_cost_table(const DecisionModel& model, const std::vector<TaskSpec>& tasks,
                           const std::vector<MapHypothesis>& maps,
                           const std::vector<EdgeSet>& extra_plans) {
  const int k = static_cast<int>(maps.size());
  const int plans = k + static_cast<int>(extra_plans.size());
  CostTable table(static_cast<int>(tasks.size()), plans, k);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const Route r = Route::direct(tasks[t].origin, tasks[t].destination);
    for (int p = 0; p < plans; ++p) {
      const EdgeSet& plan = p < k ? maps[static_cast<std::size_t>(p)].edges()
                                  : extra_plans[static_cast<std::size_t>(p - k)];
      for (int j = 0; j < k; ++j) {
        table.at(static_cast<int>(t), p, j) =
            cost(model, r, plan, maps[static_cast<std::size_t>(j)].edges());
      }
    }
  }
  return table;
}

int Posterior::map_estimate() const {
  int best = -1;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (best < 0 || probs[i] > probs[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

double futures(const DecisionModel& model, const std::vector<TaskSpec>& tasks,
               const Posterior& info, int truth) {
  if (truth < 0 || info.maps.empty()) return model.penalty() * total_expected_count(tasks);
  return futures(model, tasks, info.maps[static_cast<std::size_t>(truth)], info);
}

double futures(const DecisionModel& model, const std::vector<TaskSpec>& tasks,
               const MapHypothesis& truth, const Posterior& info) {
  const int m = info.map_estimate();
  if (m < 0) return model.penalty() * total_expected_count(tasks);
  const MapHypothesis& plan = info.maps[static_cast<std::size_t>(m)];
  double s = 0.0;
  for (const auto& t : tasks) {
    if (t.expected_count == 0.0) continue;
    s += t.expected_count * cost(model, t, plan, truth);
  }
  return s;
}

double ev_known_path(const DecisionModel& model, const std::vector<TaskSpec>& tasks,
                     const Route& route, const EdgeSet& plan, const Posterior& info) {
  return route_cost_under(model, tasks, route, plan, info, info);
}

double ev_known_path_perfect(const DecisionModel& model, const std::vector<TaskSpec>& tasks,
                             const Route& route, const EdgeSet& plan,
                             const MapHypothesis& world, const Posterior& info) {
  return cost(model, route, plan, world.edges()) + futures(model, tasks, world, info);
}

void SensingProposal::validate(int map_count) const {
  const auto n = outcomes.size();
  if (likelihood.size() != n || nota_likelihood.size() != n) {
    throw OutcomesNotExhaustive("outcome tables have inconsistent sizes");
  }
  for (int j = 0; j <= map_count; ++j) {
    double s = 0.0;
    for (std::size_t o = 0; o < n; ++o) {
      if (j < map_count) {
        if (likelihood[o].size() != static_cast<std::size_t>(map_count)) {
          throw OutcomesNotExhaustive("likelihood row has the wrong map count");
        }
        s += likelihood[o][static_cast<std::size_t>(j)];
      } else {
        s += nota_likelihood[o];
      }
    }
    if (std::abs(s - 1.0) > 1e-9) throw OutcomesNotExhaustive("outcome likelihoods do not sum to 1");
  }
}

SensingProposal make_proposal(const BeliefState& belief, Intersection location,
                              std::vector<Detector> detectors, Route route) {
  if (!belief.grid().contains(location)) throw InvalidArgument("location outside grid");
  if (detectors.size() > 16) throw InvalidArgument("too many detectors in one proposal");
  SensingProposal prop;
  prop.location = location;
  prop.detectors = std::move(detectors);
  prop.route = std::move(route);

  const auto& noise = belief.config().noise;
  const auto& maps = belief.hypotheses().maps;
  std::vector<SensorReading> local;
  for (const auto& r : belief.evidence()) {
    if (r.location == location) local.push_back(r);
  }
  const double base = nota_location_likelihood(belief.grid(), location, local, noise);

  const std::size_t d = prop.detectors.size();
  const std::size_t n = std::size_t{1} << d;
  for (std::size_t o = 0; o < n; ++o) {
    std::vector<bool> results(d);
    for (std::size_t i = 0; i < d; ++i) results[i] = ((o >> (d - 1 - i)) & 1u) != 0;
    std::vector<double> row(maps.size(), 1.0);
    for (std::size_t j = 0; j < maps.size(); ++j) {
      const JunctionType t = maps[j].junction(location);
      for (std::size_t i = 0; i < d; ++i) {
        row[j] *= noise.likelihood(results[i], feature_present(t, prop.detectors[i]));
      }
    }
    auto extended = local;
    for (std::size_t i = 0; i < d; ++i) {
      extended.push_back(SensorReading{location, prop.detectors[i], results[i], 0, false});
    }
    const double with = nota_location_likelihood(belief.grid(), location, extended, noise);
    // A zero base only arises from contradictory certain evidence; fall back
    // to the uniform-junction outcome model alone.
    double nota_l = 0.0;
    if (base > 0.0) {
      nota_l = with / base;
    } else {
      std::vector<SensorReading> fresh(extended.end() - static_cast<std::ptrdiff_t>(d), extended.end());
      nota_l = nota_location_likelihood(belief.grid(), location, fresh, noise);
    }
    prop.outcomes.push_back(std::move(results));
    prop.likelihood.push_back(std::move(row));
    prop.nota_likelihood.push_back(nota_l);
  }
  return prop;
}

double ev_unknown_path(const DecisionModel& model, const std::vector<TaskSpec>& tasks,
                       const EdgeSet& plan, const Posterior& info,
                       const SensingProposal& proposal) {
  const auto k = info.maps.size();
  proposal.validate(static_cast<int>(k));

  double immediate = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (info.probs[j] == 0.0) continue;
    immediate += info.probs[j] * cost(model, proposal.route, plan, info.maps[j].edges());
  }
  immediate += info.probs[k] * model.penalty();

  double future = 0.0;
  std::vector<double> post(k + 1);
  for (std::size_t o = 0; o < proposal.outcomes.size(); ++o) {
    double pr = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      post[j] = proposal.likelihood[o][j] * info.probs[j];
      pr += post[j];
    }
    post[k] = proposal.nota_likelihood[o] * info.probs[k];
    pr += post[k];
    if (pr <= 0.0) continue;
    for (double& v : post) v /= pr;
    const Posterior after{info.maps, post};
    double inner = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (post[j] == 0.0) continue;
      inner += post[j] * futures(model, tasks, after, static_cast<int>(j));
    }
    if (post[k] > 0.0) inner += post[k] * futures(model, tasks, after, -1);
    future += pr * inner;
  }
  return immediate + future;
}

std::string_view path_choice_name(PathChoice c) {
  return c == PathChoice::Known ? "P_K" : "P_U";
}

PathDecision choose_path(const DecisionModel& model, const std::vector<TaskSpec>& tasks,
                         const Route& known_route, const EdgeSet& known_plan,
                         const EdgeSet& unknown_plan, const Posterior& info,
                         const SensingProposal& proposal) {
  PathDecision d;
  d.ev_known = ev_known_path(model, tasks, known_route, known_plan, info);
  d.ev_unknown = ev_unknown_path(model, tasks, unknown_plan, info, proposal);
  d.choice = d.ev_unknown < d.ev_known ? PathChoice::Unknown : PathChoice::Known;
  return d;
}

}  // namespace mapx
