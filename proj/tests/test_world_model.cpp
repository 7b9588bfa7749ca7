#include <doctest.h>

#include <set>

#include "mapx/errors.hpp"
#include "mapx/world_model.hpp"
#include "oracles.hpp"

using namespace mapx;

TEST_CASE("grid edge ids are dense and round-trip") {
  for (auto [nx, ny] : {std::pair{1, 1}, {2, 2}, {3, 2}, {4, 4}, {5, 3}}) {
    const GridSpec g(nx, ny);
    CHECK(g.edge_count() == nx * (ny - 1) + ny * (nx - 1));
    std::set<int> ids;
    for (int i = 0; i < g.intersection_count(); ++i) {
      const Intersection p = g.at(i);
      for (Direction d : kDirections) {
        auto id = g.edge_id(p, d);
        CHECK(id.has_value() == g.neighbor(p, d).has_value());
        if (!id) continue;
        ids.insert(*id);
        const Edge e = g.edge(*id);
        CHECK(((e.from == p && e.to() == *g.neighbor(p, d)) ||
               (e.to() == p && e.from == *g.neighbor(p, d))));
        CHECK(g.edge_id(*g.neighbor(p, d), opposite(d)) == id);
      }
    }
    CHECK(static_cast<int>(ids.size()) == g.edge_count());
    if (!ids.empty()) CHECK(*ids.rbegin() == g.edge_count() - 1);
  }
}

TEST_CASE("grid rejects bad dimensions") {
  CHECK_THROWS_AS(GridSpec(0, 3), InvalidArgument);
  CHECK_THROWS_AS(GridSpec(3, 65), InvalidArgument);
}

TEST_CASE("junction classes") {
  CHECK(JunctionType{0}.class_label() == JunctionClass::None);
  CHECK(JunctionType{bit(Direction::North)}.class_label() == JunctionClass::DeadEnd);
  CHECK(JunctionType{static_cast<DirectionSet>(bit(Direction::North) | bit(Direction::South))}
            .class_label() == JunctionClass::Straight);
  CHECK(JunctionType{static_cast<DirectionSet>(bit(Direction::North) | bit(Direction::East))}
            .class_label() == JunctionClass::L);
  CHECK(JunctionType{0b0111}.class_label() == JunctionClass::T);
  CHECK(JunctionType{0b1111}.class_label() == JunctionClass::Cross);
}

TEST_CASE("2x2 universe has 14 maps and matches flood-fill enumeration") {
  const GridSpec g(2, 2);
  const auto lib = enumerate_maps(g);
  const auto ref = oracle::all_maps(g);
  CHECK(lib.size() == 14);
  REQUIRE(lib.size() == ref.size());
  for (std::size_t i = 0; i < lib.size(); ++i) CHECK(lib[i] == ref[i]);
}

TEST_CASE("3x3 enumeration matches flood-fill oracle") {
  const GridSpec g(3, 3);
  const auto lib = enumerate_maps(g);
  const auto ref = oracle::all_maps(g);
  CHECK(lib.size() == ref.size());
  CHECK(std::equal(lib.begin(), lib.end(), ref.begin(), ref.end()));
}

TEST_CASE("enumeration budget") {
  CHECK_THROWS_AS(enumerate_maps(GridSpec(4, 4), 1 << 10), BudgetExceeded);
}

TEST_CASE("constrained enumeration equals filtered universe") {
  const GridSpec g(3, 2);
  const auto all = enumerate_maps(g);
  oracle::Gen gen(7);
  for (int trial = 0; trial < 30; ++trial) {
    EdgeConstraints c(static_cast<std::size_t>(g.edge_count()), EdgeState::Unknown);
    for (auto& s : c) {
      const int r = gen.integer(0, 4);
      s = r == 0 ? EdgeState::Present : r == 1 ? EdgeState::Absent : EdgeState::Unknown;
    }
    std::vector<MapHypothesis> filtered;
    for (const auto& m : all) {
      bool ok = true;
      for (int i = 0; i < g.edge_count(); ++i) {
        if (c[i] == EdgeState::Present && !m.has_edge(i)) ok = false;
        if (c[i] == EdgeState::Absent && m.has_edge(i)) ok = false;
      }
      if (ok) filtered.push_back(m);
    }
    CHECK(enumerate_maps(g, c) == filtered);
  }
}

TEST_CASE("map construction rejects disconnected LDPs") {
  const GridSpec g(3, 1);
  CHECK_NOTHROW(MapHypothesis(g, EdgeSet{true, false}));
  CHECK_NOTHROW(MapHypothesis::empty(g));
  const GridSpec g2(4, 1);
  CHECK_THROWS_AS(MapHypothesis(g2, EdgeSet{true, false, true}), InvalidArgument);
}

TEST_CASE("from_junctions checks edge consistency") {
  const GridSpec g(2, 1);
  const JunctionType east{bit(Direction::East)};
  const JunctionType west{bit(Direction::West)};
  const auto m = MapHypothesis::from_junctions(g, {east, west});
  CHECK(m.has_edge(0));
  CHECK_THROWS_AS(MapHypothesis::from_junctions(g, {east, JunctionType{0}}), InvalidArgument);
  CHECK_THROWS_AS(MapHypothesis::from_junctions(g, {west, east}), InvalidArgument);
}

TEST_CASE("density weight") {
  CHECK(density_weight(0.5) == doctest::Approx(1.0));
  CHECK(density_weight(0.0) == doctest::Approx(0.05));
  CHECK(density_weight(1.0) == doctest::Approx(0.05));
  CHECK(density_weight(0.25) == doctest::Approx(0.5));
}

TEST_CASE("sampled maps are valid, deterministic and respect constraints") {
  oracle::Gen gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const GridSpec g(gen.integer(1, 5), gen.integer(1, 5));
    const auto seed = static_cast<std::uint64_t>(trial);
    const auto a = sample_map(g, seed);
    CHECK(a == sample_map(g, seed));
    CHECK(ldps_connected(g, a.edges()));
  }
  const GridSpec g(4, 4);
  EdgeConstraints c(static_cast<std::size_t>(g.edge_count()), EdgeState::Unknown);
  c[0] = EdgeState::Present;
  c[5] = EdgeState::Absent;
  c[10] = EdgeState::Present;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto m = sample_map(g, s, true, c);
    CHECK(m.has_edge(0));
    CHECK(!m.has_edge(5));
    CHECK(m.has_edge(10));
  }
}

TEST_CASE("uniform sampling on 2x2 gives edge frequency near the universe average") {
  // In the 14-map universe each edge appears in 7 maps (frequency 1/2).
  const GridSpec g(2, 2);
  std::vector<int> counts(4, 0);
  const int n = 4000;
  for (int s = 0; s < n; ++s) {
    const auto m = sample_map(g, static_cast<std::uint64_t>(s), false);
    for (int e = 0; e < 4; ++e) counts[e] += m.has_edge(e);
  }
  for (int e = 0; e < 4; ++e) CHECK(counts[e] / static_cast<double>(n) == doctest::Approx(0.5).epsilon(0.08));
}

TEST_CASE("density preference favours medium density over uniform sampling") {
  const GridSpec g(3, 3);
  double pref = 0.0, uni = 0.0;
  const int n = 400;
  for (int s = 0; s < n; ++s) {
    pref += density_weight(sample_map(g, static_cast<std::uint64_t>(s), true).density());
    uni += density_weight(sample_map(g, static_cast<std::uint64_t>(s), false).density());
  }
  CHECK(pref / n > uni / n);
}

TEST_CASE("shortest path agrees with Floyd-Warshall") {
  oracle::Gen gen(11);
  for (int trial = 0; trial < 40; ++trial) {
    const GridSpec g(gen.integer(1, 4), gen.integer(1, 4));
    const auto m = sample_map(g, static_cast<std::uint64_t>(trial) + 100);
    const auto d = oracle::all_pairs(g.nx(), g.ny(), [&](Intersection a, Intersection b) {
      return oracle::edge_present(m, a, b);
    });
    for (int i = 0; i < g.intersection_count(); ++i) {
      for (int j = 0; j < g.intersection_count(); ++j) {
        auto got = shortest_path(m, g.at(i), g.at(j));
        if (d[i][j] >= oracle::unreachable()) {
          CHECK(!got);
        } else {
          REQUIRE(got);
          CHECK(*got == d[i][j]);
          auto route = shortest_route(g, m.edges(), g.at(i), g.at(j));
          REQUIRE(route);
          CHECK(static_cast<int>(route->size()) == d[i][j] + 1);
        }
      }
    }
  }
}
