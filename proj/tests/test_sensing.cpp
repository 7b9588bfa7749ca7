#include <doctest.h>

#include "mapx/errors.hpp"
#include "mapx/sensing.hpp"
#include "oracles.hpp"

using namespace mapx;

TEST_CASE("geometry table matches first-principles feature rules") {
  for (int s = 0; s < 16; ++s) {
    const auto t = geometry_features(JunctionType{static_cast<DirectionSet>(s)});
    for (int i = 0; i < kDetectorCount; ++i) {
      const Detector d = Detector::from_index(i);
      CHECK(t[static_cast<std::size_t>(i)] ==
            oracle::feature(static_cast<DirectionSet>(s), d.feature, d.wedge.index));
    }
  }
}

TEST_CASE("exactly one feature per wedge for every junction type") {
  for (int s = 0; s < 16; ++s) {
    const auto t = geometry_features(JunctionType{static_cast<DirectionSet>(s)});
    for (int w = 0; w < kWedgeCount; ++w) {
      int count = 0;
      for (int f = 0; f < kFeatureCount; ++f) count += t[static_cast<std::size_t>(f * kWedgeCount + w)];
      CHECK(count == 1);
    }
  }
}

TEST_CASE("wedge layout") {
  CHECK(wedge_toward(Direction::North).index == 0);
  CHECK(wedge_toward(Direction::West).index == 2);
  CHECK(wedge_toward(Direction::South).index == 4);
  CHECK(wedge_toward(Direction::East).index == 6);
  CHECK(Wedge{7}.flanks() == std::pair{Direction::East, Direction::North});
  CHECK(Detector::from_index(Detector{Feature::ConcaveCorner, Wedge{5}}.index()) ==
        Detector{Feature::ConcaveCorner, Wedge{5}});
}

TEST_CASE("dead end facing north") {
  const auto t = geometry_features(JunctionType{bit(Direction::North)});
  CHECK(t[Detector{Feature::Opening, Wedge{0}}.index()]);
  CHECK(t[Detector{Feature::FlatWall, Wedge{2}}.index()]);
  CHECK(t[Detector{Feature::FlatWall, Wedge{1}}.index()]);
  CHECK(t[Detector{Feature::ConcaveCorner, Wedge{3}}.index()]);
}

TEST_CASE("edge-consistency mirror between neighbours") {
  const GridSpec g(3, 3);
  for (const auto& m : enumerate_maps(g)) {
    for (int i = 0; i < g.intersection_count(); ++i) {
      const Intersection p = g.at(i);
      for (Direction d : kDirections) {
        auto q = g.neighbor(p, d);
        if (!q) continue;
        CHECK(feature_present(m.junction(p), Detector{Feature::Opening, wedge_toward(d)}) ==
              feature_present(m.junction(*q), Detector{Feature::Opening, wedge_toward(opposite(d))}));
      }
    }
  }
}

TEST_CASE("noiseless sense equals geometry") {
  const GridSpec g(3, 3);
  const auto m = sample_map(g, 5);
  Rng rng(1);
  for (int i = 0; i < g.intersection_count(); ++i) {
    const auto readings = scan(m, g.at(i), NoiseModel{0.0, 0.0}, rng);
    REQUIRE(readings.size() == kDetectorCount);
    for (const auto& r : readings) CHECK(r.result == feature_present(m.junction(r.location), r.detector));
  }
}

TEST_CASE("noise rates are realised") {
  const GridSpec g(1, 2);
  const auto m = MapHypothesis(g, EdgeSet{true});
  const NoiseModel noise{0.2, 0.1};
  Rng rng(9);
  const Detector open_n{Feature::Opening, Wedge{0}};   // present at (0,0)
  const Detector open_s{Feature::Opening, Wedge{4}};   // absent at (0,0)
  int fn = 0, fp = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    fn += !sense(m, {0, 0}, open_n, noise, rng).result;
    fp += sense(m, {0, 0}, open_s, noise, rng).result;
  }
  CHECK(fn / static_cast<double>(n) == doctest::Approx(0.2).epsilon(0.05));
  CHECK(fp / static_cast<double>(n) == doctest::Approx(0.1).epsilon(0.08));
}

TEST_CASE("fn = fp = 0.5 makes readings uninformative") {
  const NoiseModel noise{0.5, 0.5};
  CHECK(noise.likelihood(true, true) == noise.likelihood(true, false));
  CHECK(noise.likelihood(false, true) == noise.likelihood(false, false));
}

TEST_CASE("noise validation") {
  CHECK_THROWS_AS((NoiseModel{-0.1, 0.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((NoiseModel{0.0, 1.5}.validate()), InvalidArgument);
}

TEST_CASE("traversal readings are certain and mirrored") {
  const GridSpec g(2, 2);
  const auto r = traversal_readings(g, {0, 0}, Direction::East, false, 3);
  CHECK(r[0].certain);
  CHECK(r[0].location == Intersection{0, 0});
  CHECK(r[0].detector == Detector{Feature::Opening, Wedge{6}});
  CHECK(r[1].location == Intersection{1, 0});
  CHECK(r[1].detector == Detector{Feature::Opening, Wedge{2}});
  CHECK(!r[1].result);
  CHECK(reading_likelihood(r[0], NoiseModel{}, true) == 0.0);
  CHECK_THROWS_AS(traversal_readings(g, {0, 0}, Direction::West, true, 0), InvalidArgument);
}

TEST_CASE("valid junction types respect borders") {
  const GridSpec g(3, 3);
  CHECK(valid_junction_types(g, {0, 0}).size() == 4);
  CHECK(valid_junction_types(g, {1, 0}).size() == 8);
  CHECK(valid_junction_types(g, {1, 1}).size() == 16);
  CHECK(valid_junction_types(GridSpec(1, 1), {0, 0}).size() == 1);
}

TEST_CASE("full noiseless scan pins exactly one type") {
  const GridSpec g(3, 3);
  const auto m = sample_map(g, 21);
  Rng rng(2);
  for (int i = 0; i < g.intersection_count(); ++i) {
    const auto readings = scan(m, g.at(i), NoiseModel{0.0, 0.0}, rng);
    const auto types = consistent_types(g, g.at(i), readings);
    REQUIRE(types.size() == 1);
    CHECK(types[0] == m.junction(g.at(i)));
  }
}
