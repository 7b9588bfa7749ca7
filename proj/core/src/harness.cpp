#include "mapx/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "json_util.hpp"
#include "mapx/belief.hpp"
#include "mapx/detector_selection.hpp"
#include "mapx/hierarchy.hpp"
#include "mapx/inference.hpp"

namespace mapx {

using detail::json;
using detail::point;
using detail::rounded;

namespace {

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

bool endpoints_reachable(const MapHypothesis& world, const std::vector<Intersection>& points) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!shortest_path(world, points[0], points[i])) return false;
  }
  return true;
}

MapHypothesis world_with_reachable(const GridSpec& grid, std::uint64_t seed,
                                   const std::vector<Intersection>& points) {
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    MapHypothesis m = sample_map(grid, derive_seed(seed, attempt));
    if (endpoints_reachable(m, points)) return m;
  }
  throw ConfigError("no sampled world connects the task endpoints");
}

const TaskSpec& draw_task(const std::vector<TaskSpec>& tasks, Rng& rng) {
  double total = 0.0;
  for (const auto& t : tasks) total += t.expected_count;
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (const auto& t : tasks) {
    acc += t.expected_count;
    if (u < acc && t.expected_count > 0.0) return t;
  }
  for (auto it = tasks.rbegin(); it != tasks.rend(); ++it) {
    if (it->expected_count > 0.0) return *it;
  }
  return tasks.back();
}

json reading_json(const SensorReading& r) {
  return {{"type", "reading"},
          {"step", r.step},
          {"at", point(r.location)},
          {"feature", std::string(feature_name(r.detector.feature))},
          {"wedge", r.detector.wedge.index},
          {"result", r.result},
          {"certain", r.certain}};
}

json belief_json(const BeliefState& b, int step) {
  json probs = json::array();
  for (std::size_t i = 0; i + 1 < b.probs().size(); ++i) probs.push_back(rounded(b.probs()[i]));
  return {{"type", "belief"},
          {"step", step},
          {"generation", b.hypotheses().generation},
          {"maps", probs},
          {"nota", rounded(b.nota())}};
}

EdgeSet present_edges(const EdgeKnowledge& k) {
  EdgeSet e(k.size(), false);
  for (std::size_t i = 0; i < k.size(); ++i) e[i] = k[i] == EdgeState::Present;
  return e;
}

class Episode {
 public:
  explicit Episode(const Scenario& s)
      : s_(s),
        world_(scenario_world(s)),
        belief_(init_belief(s.grid, s.hypotheses, derive_seed(s.seed, "hypotheses"), config(s))),
        knowledge_(unknown_edges(s.grid)),
        levels_(build_hierarchy(s.grid)),
        task_rng_(derive_seed(s.seed, "tasks")),
        sense_rng_(derive_seed(s.seed, "sense")),
        walk_rng_(derive_seed(s.seed, "walk")),
        scanned_(static_cast<std::size_t>(s.grid.intersection_count()), false) {
    active_level_ = static_cast<int>(levels_.size()) - 1;
  }

  EpisodeLog run() {
    emit({{"type", "episode"},
          {"seed", s_.seed},
          {"grid", json::array({s_.grid.nx(), s_.grid.ny()})},
          {"hypotheses", belief_.map_count()},
          {"exhaustive", belief_.hypotheses().exhaustive},
          {"structure", std::string(structure_name(s_.structure))},
          {"method", std::string(method_name(s_.method))},
          {"world", json::parse(map_to_json(world_))}});
    emit(belief_json(belief_, 0));

    bool placed = false;
    for (int t = 0; t < s_.task_draws; ++t) {
      const TaskSpec& task = draw_task(s_.tasks, task_rng_);
      ++log_.summary.tasks_drawn;
      if (!placed) {
        pos_ = task.origin;
        placed = true;
      }
      emit({{"type", "task"}, {"step", step_}, {"index", t}, {"id", task.id},
            {"origin", point(task.origin)}, {"destination", point(task.destination)}});
      NavigationOutcome outcome = leg(task.origin, task);
      if (outcome == NavigationOutcome::Reached) outcome = leg(task.destination, task);
      if (outcome == NavigationOutcome::Reached) ++log_.summary.tasks_completed;
      emit({{"type", "task_end"}, {"step", step_}, {"index", t},
            {"outcome", std::string(outcome_name(outcome))}});
    }

    auto& sum = log_.summary;
    sum.readings = static_cast<int>(belief_.evidence().size());
    sum.simulated_minutes = sum.traversal_cost * s_.time_scale.traversal_minutes +
                            noisy_readings_ * s_.time_scale.sensing_minutes;
    const auto idx = belief_.hypotheses().index_of(world_);
    sum.true_map_in_set = idx.has_value();
    sum.true_map_mass = idx ? belief_.probs()[static_cast<std::size_t>(*idx)] : 0.0;
    sum.nota = belief_.nota();
    log_.final_probs = belief_.probs();
    emit({{"type", "summary"},
          {"traversal_cost", rounded(sum.traversal_cost)},
          {"tasks_drawn", sum.tasks_drawn},
          {"tasks_completed", sum.tasks_completed},
          {"readings", sum.readings},
          {"regenerations", sum.regenerations},
          {"simulated_minutes", rounded(sum.simulated_minutes)},
          {"true_map_in_set", sum.true_map_in_set},
          {"true_map_mass", rounded(sum.true_map_mass)},
          {"nota", rounded(sum.nota)}});
    return std::move(log_);
  }

 private:
  static BeliefConfig config(const Scenario& s) {
    BeliefConfig c;
    c.noise = s.noise;
    c.structure = s.structure;
    c.enumeration_budget = s.enumeration_budget;
    return c;
  }

  void emit(const json& record) { log_.records.push_back(record.dump()); }

  void add_reading(const SensorReading& r) {
    belief_ = update(belief_, r);
    emit(reading_json(r));
  }

  void arrive() {
    const auto i = static_cast<std::size_t>(s_.grid.index(pos_));
    if (scanned_[i]) return;
    scanned_[i] = true;
    for (const auto& r : scan(world_, pos_, s_.noise, sense_rng_, step_)) {
      add_reading(r);
      ++noisy_readings_;
    }
    emit(belief_json(belief_, step_));
  }

  void maybe_regenerate() {
    if (!nota_triggered(belief_)) return;
    const auto evidence_size = belief_.evidence().size();
    if (evidence_size == evidence_at_regeneration_) return;
    evidence_at_regeneration_ = evidence_size;
    const int generation = belief_.hypotheses().generation + 1;
    try {
      belief_ = regenerate(belief_, derive_seed(derive_seed(s_.seed, "regenerate"),
                                                static_cast<std::uint64_t>(generation)));
    } catch (const NoConsistentMap& e) {
      emit({{"type", "regeneration_failed"}, {"step", step_}, {"reason", e.what()}});
      return;
    }
    ++log_.summary.regenerations;
    emit({{"type", "regeneration"},
          {"step", step_},
          {"generation", belief_.hypotheses().generation},
          {"size", belief_.map_count()},
          {"exhaustive", belief_.hypotheses().exhaustive},
          {"contains_world", belief_.hypotheses().index_of(world_).has_value()}});
    emit(belief_json(belief_, step_));
  }

  void adjust_level() {
    if (!s_.hierarchy) return;
    bool descended = false;
    while (active_level_ > 0 &&
           should_descend(levels_, active_level_, belief_, s_.descend_threshold)) {
      --active_level_;
      descended = true;
    }
    json record = {{"type", "hierarchy"}, {"step", step_}, {"level", active_level_},
                   {"descended", descended}};
    if (active_level_ > 0) {
      const auto c = consistent_count(levels_[static_cast<std::size_t>(active_level_ - 1)], belief_);
      record["next_level_count"] = rounded(c.count);
      record["exact"] = c.exact;
    }
    const auto ab = abstract_belief(levels_[static_cast<std::size_t>(active_level_)], belief_);
    record["abstract_hypotheses"] = ab.maps.size();
    emit(record);
  }

  // Chooses P_K or P_U at the current position; returns the route to follow
  // when P_K wins and a known route exists.
  std::optional<std::vector<Intersection>> decide(Intersection goal) {
    const EdgeSet known = present_edges(knowledge_);
    auto known_route = shortest_route(s_.grid, known, pos_, goal);

    EdgeSet plan = belief_.hypotheses().maps[static_cast<std::size_t>(belief_.map_estimate())].edges();
    for (std::size_t i = 0; i < plan.size(); ++i) {
      if (knowledge_[i] == EdgeState::Present) plan[i] = true;
      if (knowledge_[i] == EdgeState::Absent) plan[i] = false;
    }
    auto unknown_route = shortest_route(s_.grid, plan, pos_, goal);
    std::optional<Intersection> frontier;
    if (unknown_route) {
      for (std::size_t i = 1; i < unknown_route->size(); ++i) {
        const Intersection p = (*unknown_route)[i];
        if (!scanned_[static_cast<std::size_t>(s_.grid.index(p))]) {
          frontier = p;
          break;
        }
      }
    }
    if (!frontier) {
      emit({{"type", "decision"}, {"step", step_}, {"proposal", nullptr},
            {"choice", known_route ? "P_K" : "P_U"}});
      return known_route;
    }

    std::vector<Detector> detectors;
    for (int i = 0; i < s_.proposal_detectors; ++i) {
      try {
        detectors.push_back(select_detector(belief_, *frontier, detectors));
      } catch (const AllDetectorsUsed&) {
        break;
      }
    }
    const DecisionModel model{s_.grid, 1.0};
    const auto proposal = make_proposal(belief_, *frontier, detectors,
                                        Route{{pos_, *frontier, goal}});
    const auto d = choose_path(model, s_.tasks, Route::direct(pos_, goal), known, plan,
                               posterior_of(belief_), proposal);
    json dets = json::array();
    for (Detector det : detectors) dets.push_back(det.index());
    emit({{"type", "decision"},
          {"step", step_},
          {"ev_pk", rounded(d.ev_known)},
          {"ev_pu", rounded(d.ev_unknown)},
          {"choice", std::string(path_choice_name(d.choice))},
          {"frontier", point(*frontier)},
          {"detectors", dets}});
    if (d.choice == PathChoice::Known) return known_route;
    return std::nullopt;
  }

  NavigationOutcome leg(Intersection goal, const TaskSpec& task) {
    (void)task;
    const int bound = step_bound(s_.grid);
    int attempts = 0;
    arrive();
    while (pos_ != goal) {
      maybe_regenerate();
      adjust_level();
      if (attempts >= bound) return NavigationOutcome::StepBoundExceeded;
      const auto known_route = decide(goal);
      std::optional<Direction> dir;
      if (known_route && known_route->size() > 1) {
        for (Direction d : kDirections) {
          if (s_.grid.neighbor(pos_, d) == (*known_route)[1]) dir = d;
        }
      } else {
        dir = choose_step(s_.method, s_.grid, pos_, goal, knowledge_, belief_.hypotheses().maps,
                          walk_rng_);
      }
      if (!dir) {
        emit({{"type", "blocked"}, {"step", step_}, {"at", point(pos_)}, {"goal", point(goal)}});
        return NavigationOutcome::Blocked;
      }
      const int id = *s_.grid.edge_id(pos_, *dir);
      const bool success = world_.has_edge(id);
      const Intersection next = *s_.grid.neighbor(pos_, *dir);
      knowledge_[static_cast<std::size_t>(id)] = success ? EdgeState::Present : EdgeState::Absent;
      emit({{"type", "attempt"}, {"step", step_}, {"from", point(pos_)}, {"to", point(next)},
            {"success", success}});
      for (const auto& r : traversal_readings(s_.grid, pos_, *dir, success, step_)) add_reading(r);
      log_.summary.traversal_cost += 1.0;
      ++attempts;
      ++step_;
      if (success) {
        pos_ = next;
        arrive();
      }
    }
    return NavigationOutcome::Reached;
  }

  const Scenario& s_;
  MapHypothesis world_;
  BeliefState belief_;
  EdgeKnowledge knowledge_;
  std::vector<AbstractionLevel> levels_;
  Rng task_rng_;
  Rng sense_rng_;
  Rng walk_rng_;
  std::vector<bool> scanned_;
  Intersection pos_;
  int step_ = 0;
  int active_level_ = 0;
  int noisy_readings_ = 0;
  std::size_t evidence_at_regeneration_ = 0;
  EpisodeLog log_;
};

}  // namespace

std::string EpisodeLog::to_jsonl() const {
  std::string out;
  for (const auto& r : records) {
    out += r;
    out += '\n';
  }
  return out;
}

MapHypothesis scenario_world(const Scenario& s) {
  if (s.world) return *s.world;
  std::vector<Intersection> points;
  for (const auto& t : s.tasks) {
    if (t.expected_count <= 0.0) continue;
    points.push_back(t.origin);
    points.push_back(t.destination);
  }
  return world_with_reachable(s.grid, derive_seed(s.seed, "world"), points);
}

EpisodeLog run_episode(const Scenario& scenario) {
  scenario.validate();
  Episode episode(scenario);
  return episode.run();
}

std::vector<Intersection> exploration_order(const GridSpec& grid, std::uint64_t seed) {
  Rng rng(seed);
  const int n = grid.intersection_count();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<Intersection> order;
  std::vector<Intersection> frontier;
  auto visit = [&](Intersection p) {
    seen[static_cast<std::size_t>(grid.index(p))] = true;
    order.push_back(p);
    for (Direction d : kDirections) {
      auto q = grid.neighbor(p, d);
      if (q && !seen[static_cast<std::size_t>(grid.index(*q))] &&
          std::find(frontier.begin(), frontier.end(), *q) == frontier.end()) {
        frontier.push_back(*q);
      }
    }
  };
  visit(grid.at(static_cast<int>(rng.below(static_cast<std::uint64_t>(n)))));
  while (!frontier.empty()) {
    const auto k = static_cast<std::size_t>(rng.below(frontier.size()));
    const Intersection p = frontier[k];
    frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(k));
    visit(p);
  }
  return order;
}

namespace {

BeliefNetwork table1_network(const GridSpec& grid, const std::vector<MapHypothesis>& maps,
                             const MapHypothesis& world, const std::vector<Intersection>& explored,
                             const NoiseModel& noise, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SensorReading> readings;
  BeliefNetworkOptions options;
  options.structure = NetworkStructure::Multiply;
  options.include_unobserved_features = true;
  for (Intersection p : explored) {
    for (const auto& r : scan(world, p, noise, rng)) readings.push_back(r);
    options.observed_junctions.emplace_back(p, world.junction(p));
  }
  return build_network(grid, maps, noise, readings, options);
}

}  // namespace

std::uint64_t table1_clique_cost(const GridSpec& grid, const std::vector<MapHypothesis>& maps,
                                 const MapHypothesis& world,
                                 const std::vector<Intersection>& explored,
                                 const NoiseModel& noise, std::uint64_t seed) {
  const auto bn = table1_network(grid, maps, world, explored, noise, seed);
  const auto moral = moralize(bn.network, bn.evidence);
  const auto cards = bn.network.cardinalities();
  const auto tri = triangulate(moral, cards);
  return largest_clique_cost(tri.cliques, cards);
}

std::vector<Table1Row> benchmark_table1(const Table1Config& config) {
  std::vector<Table1Row> rows;
  for (int h : config.hypothesis_sizes) {
    for (int len : config.exploration_lengths) {
      if (h < 1 || len < 0 || len > config.grid.intersection_count()) {
        throw ConfigError("benchmark cell out of range");
      }
      rows.push_back(Table1Row{h, len, std::nullopt, 0.0});
    }
  }
  std::vector<double> total_ms(rows.size(), 0.0);
  for (int run = 0; run < config.runs; ++run) {
    const std::uint64_t run_seed = derive_seed(config.seed, static_cast<std::uint64_t>(run));
    const MapHypothesis world = sample_map(config.grid, derive_seed(run_seed, "world"));
    const auto order = exploration_order(config.grid, derive_seed(run_seed, "order"));
    std::size_t row = 0;
    for (int h : config.hypothesis_sizes) {
      BeliefConfig bc;
      bc.noise = config.noise;
      const auto maps =
          init_belief(config.grid, h, derive_seed(run_seed, static_cast<std::uint64_t>(h)), bc)
              .hypotheses()
              .maps;
      for (int len : config.exploration_lengths) {
        const std::vector<Intersection> explored(order.begin(), order.begin() + len);
        const std::uint64_t sense_seed = derive_seed(run_seed, "sense");
        const auto start = std::chrono::steady_clock::now();
        rows[row].largest_clique_cost += static_cast<double>(
            table1_clique_cost(config.grid, maps, world, explored, config.noise, sense_seed));
        if (config.timing) {
          const auto bn = table1_network(config.grid, maps, world, explored, config.noise, sense_seed);
          (void)propagate(bn.network, bn.evidence);
          const auto stop = std::chrono::steady_clock::now();
          total_ms[row] += std::chrono::duration<double, std::milli>(stop - start).count();
        }
        ++row;
      }
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].largest_clique_cost /= config.runs;
    if (config.timing) rows[i].update_time_ms = total_ms[i] / config.runs;
  }
  return rows;
}

std::string table1_csv(const std::vector<Table1Row>& rows) {
  std::string out = "hypothesis_size,exploration_length,update_time_ms,largest_clique_cost\n";
  for (const auto& r : rows) {
    out += std::to_string(r.hypothesis_size) + "," + std::to_string(r.exploration_length) + "," +
           (r.update_time_ms ? format_number(*r.update_time_ms) : std::string("NA")) + "," +
           format_number(r.largest_clique_cost) + "\n";
  }
  return out;
}

std::vector<MethodSummary> compare_methods(const Scenario& scenario,
                                           const std::vector<NavigationMethod>& methods,
                                           int trials, int rollouts) {
  scenario.validate();
  if (trials < 1) throw ConfigError("trials must be at least 1");
  BeliefConfig bc;
  bc.noise = scenario.noise;
  bc.structure = NetworkStructure::Singly;
  bc.enumeration_budget = scenario.enumeration_budget;
  const BeliefState prior =
      init_belief(scenario.grid, scenario.hypotheses, derive_seed(scenario.seed, "hypotheses"), bc);

  struct Trial {
    MapHypothesis world;
    TaskSpec task;
  };
  std::vector<Trial> plan;
  for (int t = 0; t < trials; ++t) {
    const auto ts = static_cast<std::uint64_t>(t);
    Rng rng(derive_seed(derive_seed(scenario.seed, "compare-task"), ts));
    TaskSpec task;
    if (!scenario.tasks.empty()) {
      task = draw_task(scenario.tasks, rng);
    } else {
      const int n = scenario.grid.intersection_count();
      task.origin = scenario.grid.at(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
      task.destination = scenario.grid.at(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
    }
    auto world = world_with_reachable(scenario.grid,
                                      derive_seed(derive_seed(scenario.seed, "compare-world"), ts),
                                      {task.origin, task.destination});
    plan.push_back({std::move(world), task});
  }

  std::vector<MethodSummary> out;
  for (NavigationMethod m : methods) {
    MethodSummary s;
    s.method = m;
    s.trials = trials;
    std::vector<double> costs;
    for (int t = 0; t < trials; ++t) {
      const auto ts = static_cast<std::uint64_t>(t);
      const Trial& trial = plan[static_cast<std::size_t>(t)];
      Rng walk(derive_seed(derive_seed(scenario.seed, "compare-walk"), ts));
      const auto res = navigate(m, trial.task.origin, trial.task.destination, trial.world,
                                unknown_edges(scenario.grid), std::nullopt, walk,
                                prior.hypotheses().maps);
      costs.push_back(res.cost());
      s.reached_fraction += res.outcome == NavigationOutcome::Reached ? 1.0 : 0.0;
      s.mean_edges_learned += res.edges_learned;
      if (rollouts > 0) {
        Rng est(derive_seed(derive_seed(scenario.seed, "compare-estimate"), ts));
        s.estimated_cost += estimate_method_cost(m, prior, trial.task, rollouts, est).mean;
      }
    }
    for (double c : costs) s.mean_cost += c;
    s.mean_cost /= trials;
    double var = 0.0;
    for (double c : costs) var += (c - s.mean_cost) * (c - s.mean_cost);
    s.cost_deviation = std::sqrt(var / trials);
    s.reached_fraction /= trials;
    s.mean_edges_learned /= trials;
    s.estimated_cost /= trials;
    out.push_back(s);
  }
  return out;
}

std::string methods_csv(const std::vector<MethodSummary>& rows) {
  std::string out =
      "method,trials,mean_cost,cost_deviation,reached_fraction,mean_edges_learned,estimated_cost\n";
  for (const auto& r : rows) {
    out += std::string(method_name(r.method)) + "," + std::to_string(r.trials) + "," +
           format_number(r.mean_cost) + "," + format_number(r.cost_deviation) + "," +
           format_number(r.reached_fraction) + "," + format_number(r.mean_edges_learned) + "," +
           format_number(r.estimated_cost) + "\n";
  }
  return out;
}

}  // namespace mapx
