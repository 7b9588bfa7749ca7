#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "mapx/errors.hpp"
#include "mapx/hierarchy.hpp"
#include "oracles.hpp"

using namespace mapx;

namespace {

// Any corridor between a point of region a and a point of region b.
bool crossing_by_scan(const AbstractionLevel& level, Intersection a, Intersection b,
                      const MapHypothesis& m) {
  const Region ra = level.region(a), rb = level.region(b);
  for (int x = ra.x0; x < ra.x1; ++x) {
    for (int y = ra.y0; y < ra.y1; ++y) {
      for (int d = 0; d < 4; ++d) {
        auto q = oracle::step(m.grid().nx(), m.grid().ny(), {x, y}, d);
        if (q && rb.contains(*q) && oracle::has_dir(m.directions({x, y}), d)) return true;
      }
    }
  }
  return false;
}

std::vector<SensorReading> noiseless_scans(const MapHypothesis& world,
                                           const std::vector<Intersection>& at) {
  std::vector<SensorReading> ev;
  Rng rng(0);
  for (auto p : at) {
    for (const auto& r : scan(world, p, NoiseModel{0.0, 0.0}, rng)) ev.push_back(r);
  }
  return ev;
}

}  // namespace

TEST_CASE("4x4 hierarchy has three levels") {
  const auto levels = build_hierarchy(GridSpec(4, 4));
  REQUIRE(levels.size() == 3);
  CHECK(levels[0].regions() == GridSpec(4, 4));
  CHECK(levels[1].regions() == GridSpec(2, 2));
  CHECK(levels[2].regions() == GridSpec(1, 1));
  CHECK(build_hierarchy(GridSpec(1, 1)).size() == 1);
}

TEST_CASE("depth for power-of-two grids") {
  for (auto [nx, ny] : {std::pair{1, 1}, {2, 2}, {4, 2}, {8, 8}, {16, 4}, {2, 32}}) {
    const int expected = static_cast<int>(std::ceil(std::log2(std::max(nx, ny)))) + 1;
    CHECK(static_cast<int>(build_hierarchy(GridSpec(nx, ny)).size()) == expected);
  }
}

TEST_CASE("partition is exact and nested") {
  for (auto [nx, ny] : {std::pair{5, 5}, {7, 3}, {6, 9}, {1, 5}}) {
    const GridSpec g(nx, ny);
    const auto levels = build_hierarchy(g);
    CHECK(levels.back().regions().intersection_count() == 1);
    for (const auto& level : levels) {
      const int b = 1 << level.level();
      CHECK(level.regions().nx() == (nx + b - 1) / b);
      CHECK(level.regions().ny() == (ny + b - 1) / b);
      for (int i = 0; i < g.intersection_count(); ++i) {
        int hits = 0;
        for (int r = 0; r < level.regions().intersection_count(); ++r) {
          hits += level.region(level.regions().at(r)).contains(g.at(i)) ? 1 : 0;
        }
        CHECK(hits == 1);
        CHECK(level.region(level.region_of(g.at(i))).contains(g.at(i)));
      }
      if (level.level() == 0) continue;
      const auto& finer = levels[static_cast<std::size_t>(level.level() - 1)];
      for (int r = 0; r < finer.regions().intersection_count(); ++r) {
        const Region f = finer.region(finer.regions().at(r));
        const Region c = level.region(level.region_of({f.x0, f.y0}));
        CHECK(c.contains({f.x1 - 1, f.y1 - 1}));
      }
    }
  }
}

TEST_CASE("abstract edge examples") {
  const GridSpec g(4, 4);
  const AbstractionLevel level(g, 1);
  EdgeSet none(static_cast<std::size_t>(g.edge_count()), false);
  CHECK(!abstract_edge_exists(level, {0, 0}, {1, 0}, none));
  EdgeSet one = none;
  one[static_cast<std::size_t>(*g.edge_id({1, 1}, Direction::East))] = true;
  CHECK(abstract_edge_exists(level, {0, 0}, {1, 0}, one));
  CHECK(!abstract_edge_exists(level, {0, 0}, {0, 1}, one));
  CHECK_THROWS_AS(abstract_edge_exists(level, {0, 0}, {1, 1}, one), NotAdjacent);
  CHECK_THROWS_AS(abstract_edge_exists(level, {0, 0}, {0, 0}, one), NotAdjacent);
}

TEST_CASE("abstract edges agree with a boundary scan") {
  const GridSpec g(4, 4);
  const auto levels = build_hierarchy(g);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto m = sample_map(g, s, s % 2 == 0);
    for (const auto& level : levels) {
      const GridSpec& rg = level.regions();
      const auto a = abstract(level, m);
      for (int id = 0; id < rg.edge_count(); ++id) {
        const Edge e = rg.edge(id);
        const bool want = crossing_by_scan(level, e.from, e.to(), m);
        CHECK(abstract_edge_exists(level, e.from, e.to(), m.edges()) == want);
        CHECK(a.edges[static_cast<std::size_t>(id)] == want);
      }
    }
  }
}

TEST_CASE("abstract edges are monotone in base edges") {
  oracle::Gen gen(2);
  const GridSpec g(5, 4);
  const auto levels = build_hierarchy(g);
  for (int trial = 0; trial < 100; ++trial) {
    EdgeSet e(static_cast<std::size_t>(g.edge_count()));
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = gen.coin(0.3);
    EdgeSet more = e;
    for (std::size_t i = 0; i < e.size(); ++i) more[i] = more[i] || gen.coin(0.3);
    for (const auto& level : levels) {
      const auto before = abstract(level, e).edges;
      const auto after = abstract(level, more).edges;
      for (std::size_t i = 0; i < before.size(); ++i) CHECK((!before[i] || after[i]));
    }
  }
}

TEST_CASE("abstract cost examples") {
  const GridSpec g(4, 4);
  const AbstractionLevel level(g, 1);
  const MapHypothesis full(g, EdgeSet(static_cast<std::size_t>(g.edge_count()), true));
  const auto a = abstract(level, full);
  CHECK(abstract_cost(level, a, {0, {0, 0}, {1, 1}, 1.0}) == 2.0);
  CHECK(abstract_cost(level, a, {0, {0, 0}, {2, 0}, 1.0}) == 3.0);
  CHECK(abstract_cost(level, a, {0, {0, 0}, {3, 3}, 1.0}) == 6.0);
  CHECK(abstract_cost(level, a, {0, {0, 0}, {2, 0}, 1.0}, 0.5) == 1.5);
  AbstractMap cut = a;
  std::fill(cut.edges.begin(), cut.edges.end(), false);
  CHECK(!abstract_cost(level, cut, {0, {0, 0}, {2, 0}, 1.0}).has_value());
}

TEST_CASE("abstract cost envelope against base shortest path") {
  // Ratio of the abstract cost of the true map to the base shortest path.
  // Each region hop costs at most 1 + side and needs at least one base edge,
  // so 1 + side bounds it above. There is no lower bound: a winding base path
  // inside few regions can be far longer than its abstract estimate.
  oracle::Gen gen(9);
  for (auto n : {4, 8}) {
    const GridSpec g(n, n);
    const auto levels = build_hierarchy(g);
    std::vector<double> lo(levels.size(), std::numeric_limits<double>::infinity());
    std::vector<double> hi(levels.size(), 0.0);
    std::vector<int> inside(levels.size(), 0);
    int instances = 0;
    while (instances < 100) {
      const auto m = sample_map(g, gen.eng());
      const Intersection a{gen.integer(0, n - 1), gen.integer(0, n - 1)};
      const Intersection b{gen.integer(0, n - 1), gen.integer(0, n - 1)};
      const auto base = shortest_path(m, a, b);
      if (!base || *base == 0) continue;
      ++instances;
      for (std::size_t l = 1; l < levels.size(); ++l) {
        const auto c = abstract_cost(levels[l], abstract(levels[l], m), {0, a, b, 1.0});
        REQUIRE(c.has_value());
        const double ratio = *c / *base;
        const double side = levels[l].block();
        lo[l] = std::min(lo[l], ratio);
        hi[l] = std::max(hi[l], ratio);
        inside[l] += ratio >= 0.5 && ratio <= 2.0 * side ? 1 : 0;
        CHECK(ratio <= 1.0 + side);
      }
    }
    for (std::size_t l = 1; l < levels.size(); ++l) {
      MESSAGE(n << "x" << n << " level " << l << ": ratio in [" << lo[l] << ", " << hi[l] << "], "
                << inside[l] << "/100 within [1/2, 2*side]");
    }
  }
}

TEST_CASE("true map stays consistent with abstracted noiseless evidence") {
  oracle::Gen gen(14);
  const GridSpec g(4, 4);
  const auto levels = build_hierarchy(g);
  for (int trial = 0; trial < 100; ++trial) {
    const auto truth = sample_map(g, gen.eng());
    std::vector<Intersection> at;
    for (int i = gen.integer(0, 6); i > 0; --i) at.push_back({gen.integer(0, 3), gen.integer(0, 3)});
    auto ev = noiseless_scans(truth, at);
    for (int i = gen.integer(0, 4); i > 0; --i) {
      const Intersection p{gen.integer(0, 3), gen.integer(0, 3)};
      const Direction d = static_cast<Direction>(gen.integer(0, 3));
      if (auto id = g.edge_id(p, d)) {
        for (const auto& r : traversal_readings(g, p, d, truth.has_edge(*id), 0)) ev.push_back(r);
      }
    }
    const auto base = evidence_constraints(g, ev);
    for (const auto& level : levels) {
      CHECK(consistent(abstract(level, truth), abstract_constraints(level, base)));
    }
  }
}

TEST_CASE("consistent count matches enumeration") {
  oracle::Gen gen(5);
  for (auto [nx, ny] : {std::pair{2, 2}, {3, 3}, {4, 2}}) {
    const GridSpec g(nx, ny);
    const auto universe = oracle::all_maps(g);
    const auto levels = build_hierarchy(g);
    for (int trial = 0; trial < 10; ++trial) {
      const auto truth = universe[static_cast<std::size_t>(gen.integer(0, static_cast<int>(universe.size()) - 1))];
      std::vector<Intersection> at;
      for (int i = gen.integer(0, g.intersection_count()); i > 0; --i) {
        at.push_back(g.at(gen.integer(0, g.intersection_count() - 1)));
      }
      BeliefConfig c;
      c.noise = NoiseModel{0.0, 0.0};
      const auto belief = with_evidence(init_belief(g, 3, 1, c), noiseless_scans(truth, at));
      for (const auto& level : levels) {
        std::set<std::vector<bool>> abstracts;
        std::size_t base_count = 0;
        for (const auto& m : universe) {
          bool ok = true;
          for (auto p : at) ok = ok && m.directions(p) == truth.directions(p);
          if (!ok) continue;
          ++base_count;
          abstracts.insert(abstract(level, m).edges);
        }
        const auto got = consistent_count(level, belief);
        CHECK(got.exact);
        CHECK(got.count == static_cast<double>(level.level() == 0 ? base_count : abstracts.size()));
      }
    }
  }
}

TEST_CASE("consistent count falls back to an upper bound") {
  const GridSpec g(5, 5);
  BeliefConfig c;
  c.enumeration_budget = 1 << 10;
  const auto belief = init_belief(g, 3, 1, c);
  const auto levels = build_hierarchy(g);
  const auto base = consistent_count(levels[0], belief);
  CHECK(!base.exact);
  // Corners admit 4 types, border points 8, interior points 16.
  CHECK(base.count == std::pow(4.0, 4) * std::pow(8.0, 12) * std::pow(16.0, 9));
  const auto coarse = consistent_count(levels[1], belief);
  CHECK(!coarse.exact);
  CHECK(coarse.count == std::pow(2.0, levels[1].regions().edge_count()));
}

TEST_CASE("should_descend examples") {
  const GridSpec g4(4, 4);
  const auto levels4 = build_hierarchy(g4);
  const auto blank = init_belief(g4, 5, 1);
  CHECK(should_descend(levels4, 1, blank, std::numeric_limits<double>::infinity()));
  CHECK(!should_descend(levels4, 1, blank, 64));
  CHECK(should_descend(levels4, 2, blank, 1e9));
  CHECK_THROWS_AS(should_descend(levels4, 0, blank), InvalidArgument);

  const GridSpec g2(2, 2);
  const auto levels2 = build_hierarchy(g2);
  const auto universe = enumerate_maps(g2);
  BeliefConfig c;
  c.noise = NoiseModel{0.0, 0.0};
  for (const auto& truth : universe) {
    const auto belief = with_evidence(init_belief(g2, 14, 1, c),
                                      noiseless_scans(truth, {{0, 0}, {1, 0}, {0, 1}}));
    CHECK(consistent_count(levels2[0], belief).count <= 4);
    CHECK(should_descend(levels2, 1, belief, 5));
  }
}

TEST_CASE("abstract belief aggregates mass") {
  const GridSpec g(4, 4);
  const AbstractionLevel level(g, 1);
  const auto b = init_belief(g, 12, 3);
  const auto a = abstract_belief(level, b);
  CHECK(a.probs.size() == a.maps.size() + 1);
  CHECK(a.probs.back() == b.nota());
  double total = 0.0;
  for (double p : a.probs) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < b.map_count(); ++i) {
    const auto mine = abstract(level, b.hypotheses().maps[static_cast<std::size_t>(i)]);
    CHECK(std::count(a.maps.begin(), a.maps.end(), mine) == 1);
  }
}
