#include <doctest.h>

#include <cmath>
#include <functional>

#include "mapx/errors.hpp"
#include "mapx/explorer.hpp"
#include "oracles.hpp"

using namespace mapx;

namespace {

// Weight of the corridor a-b from its knowledge state and map counts.
double weight_by_hand(const GridSpec& g, Intersection a, Intersection b, const EdgeKnowledge& k,
                      const std::vector<MapHypothesis>& maps) {
  const EdgeState s = k[static_cast<std::size_t>(*g.edge_between(a, b))];
  if (s == EdgeState::Present) return 1.0;
  if (s == EdgeState::Absent) return 0.0;
  int m = 0;
  for (const auto& h : maps) m += oracle::edge_present(h, a, b) ? 1 : 0;
  return (m + 1.0) / (static_cast<double>(maps.size()) + 1.0);
}

// Every simple path by depth-first search, ranked by value, length, then
// index sequence.
std::optional<std::pair<std::vector<int>, double>> best_by_enumeration(
    const GridSpec& g, Intersection start, Intersection goal, const EdgeKnowledge& k,
    const std::vector<MapHypothesis>& maps) {
  std::optional<std::pair<std::vector<int>, double>> best;
  std::vector<int> path{g.index(start)};
  std::vector<bool> on(static_cast<std::size_t>(g.intersection_count()), false);
  on[g.index(start)] = true;
  std::function<void(double)> dfs = [&](double value) {
    const Intersection here = g.at(path.back());
    if (here == goal) {
      const bool take = !best || value > best->second + 1e-12 ||
                        (std::abs(value - best->second) <= 1e-12 &&
                         (path.size() < best->first.size() ||
                          (path.size() == best->first.size() && path < best->first)));
      if (take) best = std::pair{path, value};
      return;
    }
    for (int d = 0; d < 4; ++d) {
      auto q = oracle::step(g.nx(), g.ny(), here, d);
      if (!q || on[g.index(*q)]) continue;
      const double w = weight_by_hand(g, here, *q, k, maps);
      if (w == 0.0) continue;
      on[g.index(*q)] = true;
      path.push_back(g.index(*q));
      dfs(value * w);
      path.pop_back();
      on[g.index(*q)] = false;
    }
  };
  dfs(1.0);
  return best;
}

std::vector<MapHypothesis> copies(const MapHypothesis& m, int n) {
  return std::vector<MapHypothesis>(static_cast<std::size_t>(n), m);
}

}  // namespace

TEST_CASE("method names round-trip") {
  for (auto m : kNavigationMethods) CHECK(parse_method(method_name(m)) == m);
  CHECK(method_name(NavigationMethod::WeightedPath) == "weighted_path");
  CHECK(!parse_method("teleport"));
}

TEST_CASE("edge weight examples") {
  const GridSpec g(2, 1);
  const MapHypothesis with(g, EdgeSet{true});
  std::vector<MapHypothesis> maps = copies(with, 3);
  for (int i = 0; i < 6; ++i) maps.push_back(MapHypothesis::empty(g));
  auto k = unknown_edges(g);
  CHECK(edge_weight(0, k, maps) == doctest::Approx(0.4));
  const std::vector<MapHypothesis> none = copies(MapHypothesis::empty(g), 9);
  CHECK(edge_weight(0, k, none) == doctest::Approx(0.1));
  CHECK(edge_weight(0, k, {}) == 1.0);
  CHECK(edge_weight(0, k, maps, NavigationMethod::ShortestIgnoringUnknown) == 1.0);
  k[0] = EdgeState::Present;
  CHECK(edge_weight(0, k, maps) == 1.0);
  CHECK(edge_weight(0, k, maps, NavigationMethod::AvoidKnown) == 0.5);
  k[0] = EdgeState::Absent;
  CHECK(edge_weight(0, k, maps) == 0.0);
  CHECK(edge_weight(0, k, maps, NavigationMethod::ShortestIgnoringUnknown) == 0.0);
}

TEST_CASE("path value examples") {
  const GridSpec g(4, 1);
  std::vector<MapHypothesis> maps = copies(MapHypothesis(g, EdgeSet{false, true, false}), 3);
  for (int i = 0; i < 6; ++i) maps.push_back(MapHypothesis::empty(g));
  auto k = unknown_edges(g);
  k[0] = k[2] = EdgeState::Present;
  const std::vector<Intersection> path{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
  CHECK(path_value(g, path, k, maps) == doctest::Approx(0.4));
  CHECK(path_value(g, {{2, 0}}, k, maps) == 1.0);
  k[2] = EdgeState::Absent;
  CHECK(path_value(g, path, k, maps) == 0.0);
}

TEST_CASE("prefix value dominates") {
  oracle::Gen gen(3);
  const GridSpec g(3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<MapHypothesis> maps;
    for (int i = 0; i < 5; ++i) maps.push_back(sample_map(g, gen.eng()));
    auto k = unknown_edges(g);
    for (auto& s : k) s = static_cast<EdgeState>(gen.integer(0, 2));
    std::vector<Intersection> path{{gen.integer(0, 2), gen.integer(0, 2)}};
    for (int i = 0; i < 6; ++i) {
      auto q = oracle::step(3, 3, path.back(), gen.integer(0, 3));
      if (q) path.push_back(*q);
    }
    for (std::size_t n = 1; n <= path.size(); ++n) {
      const std::vector<Intersection> prefix(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(n));
      CHECK(path_value(g, prefix, k, maps) >= path_value(g, path, k, maps));
    }
  }
}

TEST_CASE("value dominates length on a 3x3 instance") {
  const GridSpec g(3, 3);
  const MapHypothesis full(g, EdgeSet(static_cast<std::size_t>(g.edge_count()), true));
  EdgeSet cut_edges = full.edges();
  const int shortcut = *g.edge_between({1, 0}, {2, 0});
  cut_edges[static_cast<std::size_t>(shortcut)] = false;
  auto maps = copies(full, 8);
  maps.emplace_back(g, cut_edges);

  EdgeKnowledge k(static_cast<std::size_t>(g.edge_count()), EdgeState::Absent);
  for (auto [a, b] : {std::pair<Intersection, Intersection>{{0, 0}, {0, 1}}, {{0, 1}, {1, 1}},
                      {{1, 1}, {2, 1}}, {{2, 1}, {2, 0}}, {{0, 0}, {1, 0}}}) {
    k[static_cast<std::size_t>(*g.edge_between(a, b))] = EdgeState::Present;
  }
  k[static_cast<std::size_t>(shortcut)] = EdgeState::Unknown;

  const auto best = best_path(g, {0, 0}, {2, 0}, k, maps);
  REQUIRE(best);
  CHECK(best->value == 1.0);
  CHECK(best->nodes.size() == 5);
  CHECK(best_step(g, {0, 0}, {2, 0}, k, maps) == Direction::North);
  CHECK(path_value(g, {{0, 0}, {1, 0}, {2, 0}}, k, maps) == doctest::Approx(0.9));
  // Once the shortcut is known present it is the shorter value-1 path.
  k[static_cast<std::size_t>(shortcut)] = EdgeState::Present;
  CHECK(best_step(g, {0, 0}, {2, 0}, k, maps) == Direction::East);
}

TEST_CASE("best path matches simple-path enumeration") {
  oracle::Gen gen(11);
  for (auto [nx, ny] : {std::pair{2, 2}, {3, 3}, {4, 3}}) {
    const GridSpec g(nx, ny);
    for (int trial = 0; trial < 60; ++trial) {
      std::vector<MapHypothesis> maps;
      for (int i = gen.integer(0, 6); i > 0; --i) maps.push_back(sample_map(g, gen.eng()));
      auto k = unknown_edges(g);
      for (auto& s : k) s = static_cast<EdgeState>(gen.coin(0.5) ? 0 : gen.integer(1, 2));
      const Intersection a = g.at(gen.integer(0, g.intersection_count() - 1));
      const Intersection b = g.at(gen.integer(0, g.intersection_count() - 1));
      if (a == b) continue;
      const auto want = best_by_enumeration(g, a, b, k, maps);
      const auto got = best_path(g, a, b, k, maps);
      REQUIRE(got.has_value() == want.has_value());
      if (!got) {
        CHECK(!best_step(g, a, b, k, maps));
        continue;
      }
      std::vector<int> nodes;
      for (auto p : got->nodes) nodes.push_back(g.index(p));
      CHECK(nodes == want->first);
      CHECK(got->value == doctest::Approx(want->second).epsilon(1e-12));
      // Determinism.
      CHECK(best_step(g, a, b, k, maps) == best_step(g, a, b, k, maps));
    }
  }
}

TEST_CASE("blocked and degenerate steps") {
  const GridSpec g(3, 3);
  EdgeKnowledge k = unknown_edges(g);
  for (Direction d : {Direction::North, Direction::East}) {
    k[static_cast<std::size_t>(*g.edge_id({0, 0}, d))] = EdgeState::Absent;
  }
  CHECK(!best_step(g, {0, 0}, {2, 2}, k, {}));
  CHECK(!best_path(g, {0, 0}, {2, 2}, k, {}));
  Rng rng(1);
  CHECK(!choose_step(NavigationMethod::RandomWalk, g, {0, 0}, {2, 2}, k, {}, rng));
  CHECK_THROWS_AS(best_step(g, {1, 1}, {1, 1}, k, {}), InvalidArgument);
  CHECK_THROWS(best_path(g, {0, 0}, {2, 2}, k, {}, NavigationMethod::RandomWalk));
}

TEST_CASE("navigate on a known world follows the shortest path") {
  const GridSpec g(4, 4);
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto world = sample_map(g, s);
    EdgeKnowledge k(static_cast<std::size_t>(g.edge_count()));
    for (int e = 0; e < g.edge_count(); ++e) {
      k[static_cast<std::size_t>(e)] = world.has_edge(e) ? EdgeState::Present : EdgeState::Absent;
    }
    for (int i = 0; i < g.intersection_count(); ++i) {
      const Intersection a{0, 0}, b = g.at(i);
      const auto d = shortest_path(world, a, b);
      Rng rng(s);
      const auto r = navigate(NavigationMethod::WeightedPath, a, b, world, k, std::nullopt, rng);
      if (!d) {
        CHECK(r.outcome == NavigationOutcome::Blocked);
        continue;
      }
      CHECK(r.outcome == NavigationOutcome::Reached);
      CHECK(static_cast<int>(r.trajectory.size()) == *d);
      for (const auto& t : r.trajectory) CHECK(t.success);
      CHECK(r.edges_learned == 0);
    }
  }
}

TEST_CASE("goal equals start") {
  const GridSpec g(2, 2);
  Rng rng(1);
  const auto r = navigate(NavigationMethod::WeightedPath, {1, 1}, {1, 1}, sample_map(g, 1),
                          unknown_edges(g), std::nullopt, rng);
  CHECK(r.outcome == NavigationOutcome::Reached);
  CHECK(r.trajectory.empty());
  CHECK(r.cost() == 0.0);
}

TEST_CASE("weighted_path reaches every reachable goal on 2x2") {
  const GridSpec g(2, 2);
  const auto universe = enumerate_maps(g);
  REQUIRE(universe.size() == 14);
  for (const auto& world : universe) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        if (!world.is_ldp(g.at(a)) || !world.is_ldp(g.at(b))) continue;
        for (const auto* maps : {&universe, static_cast<const std::vector<MapHypothesis>*>(nullptr)}) {
          Rng rng(7);
          const auto r = navigate(NavigationMethod::WeightedPath, g.at(a), g.at(b), world,
                                  unknown_edges(g), std::nullopt, rng,
                                  maps ? *maps : std::vector<MapHypothesis>{});
          CHECK(r.outcome == NavigationOutcome::Reached);
          CHECK(static_cast<int>(r.trajectory.size()) <= step_bound(g));
          CHECK(r.position == g.at(b));
        }
      }
    }
  }
}

TEST_CASE("navigation terminates and knowledge is monotone on 3x3") {
  oracle::Gen gen(19);
  const GridSpec g(3, 3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto world = sample_map(g, gen.eng());
    std::vector<MapHypothesis> maps;
    for (int i = gen.integer(0, 5); i > 0; --i) maps.push_back(sample_map(g, gen.eng()));
    EdgeKnowledge k = unknown_edges(g);
    for (int e = 0; e < g.edge_count(); ++e) {
      if (gen.coin(0.2)) k[static_cast<std::size_t>(e)] = world.has_edge(e) ? EdgeState::Present : EdgeState::Absent;
    }
    const Intersection a = g.at(gen.integer(0, 8)), b = g.at(gen.integer(0, 8));
    const auto method = kNavigationMethods[trial % 4];
    Rng rng(gen.eng());
    const auto r = navigate(method, a, b, world, k, std::nullopt, rng, maps);
    CHECK(static_cast<int>(r.trajectory.size()) <= step_bound(g));
    const bool reachable = shortest_path(world, a, b).has_value();
    if (method == NavigationMethod::WeightedPath || method == NavigationMethod::ShortestIgnoringUnknown) {
      CHECK((r.outcome == NavigationOutcome::Reached) == reachable);
    }
    if (r.outcome == NavigationOutcome::Reached) CHECK(r.position == b);
    int learned = 0;
    for (int e = 0; e < g.edge_count(); ++e) {
      const auto before = k[static_cast<std::size_t>(e)], after = r.knowledge[static_cast<std::size_t>(e)];
      if (before != EdgeState::Unknown) CHECK(after == before);
      if (after != EdgeState::Unknown) CHECK((after == EdgeState::Present) == world.has_edge(e));
      learned += before == EdgeState::Unknown && after != EdgeState::Unknown ? 1 : 0;
    }
    CHECK(learned == r.edges_learned);
    Intersection at = a;
    for (const auto& t : r.trajectory) {
      CHECK(t.from == at);
      CHECK(t.success == world.has_edge(*g.edge_between(t.from, t.to)));
      if (t.success) at = t.to;
    }
    CHECK(at == r.position);
  }
}

TEST_CASE("navigate feeds traversal evidence to the belief") {
  const GridSpec g(3, 3);
  const auto world = sample_map(g, 4);
  auto belief = init_belief(g, 6, 2);
  Rng rng(3);
  const auto r = navigate(NavigationMethod::WeightedPath, {0, 0}, {2, 2}, world, unknown_edges(g),
                          belief, rng);
  REQUIRE(r.belief);
  CHECK(r.belief->evidence().size() == 2 * r.trajectory.size());
  CHECK(edge_knowledge(g, r.belief->evidence()) == r.knowledge);
}

TEST_CASE("cost estimates") {
  const GridSpec g(3, 3);
  const auto world = sample_map(g, 12);
  std::vector<SensorReading> ev;
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge ed = g.edge(e);
    for (const auto& r : traversal_readings(g, ed.from, ed.dir, world.has_edge(e), 0)) ev.push_back(r);
  }
  const auto belief = with_evidence(make_belief(g, HypothesisSet{{world}, false, 0, 0}), ev);
  const Intersection a = g.at(0);
  Intersection b = a;
  for (int i = 0; i < 9; ++i) {
    if (world.is_ldp(a) && shortest_path(world, a, g.at(i)).value_or(0) > shortest_path(world, a, b).value_or(0)) b = g.at(i);
  }
  const TaskSpec task{0, a, b, 1.0};
  Rng rng(5);
  const auto est = estimate_method_cost(NavigationMethod::WeightedPath, belief, task, 25, rng);
  CHECK(est.deviation == 0.0);
  CHECK(est.mean == static_cast<double>(shortest_path(world, a, b).value_or(0)));
  Rng one(6);
  CHECK(estimate_method_cost(NavigationMethod::WeightedPath, belief, task, 1, one).mean == est.mean);
  CHECK_THROWS_AS(estimate_method_cost(NavigationMethod::WeightedPath, belief, task, 0, one),
                  InvalidArgument);
}

TEST_CASE("estimates are deterministic and weighted_path beats random_walk") {
  const GridSpec g(3, 3);
  const TaskSpec task{0, {0, 0}, {2, 2}, 1.0};
  double weighted = 0.0, random = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto belief = init_belief(g, 10, seed);
    Rng r1(seed), r2(seed);
    const auto w1 = estimate_method_cost(NavigationMethod::WeightedPath, belief, task, 10, r1);
    const auto w2 = estimate_method_cost(NavigationMethod::WeightedPath, belief, task, 10, r2);
    CHECK(w1.mean == w2.mean);
    CHECK(w1.deviation == w2.deviation);
    Rng r3(seed);
    weighted += w1.mean;
    random += estimate_method_cost(NavigationMethod::RandomWalk, belief, task, 10, r3).mean;
  }
  MESSAGE("mean cost over 50 seeds: weighted_path " << weighted / 50 << ", random_walk " << random / 50);
  CHECK(weighted <= random);
}
