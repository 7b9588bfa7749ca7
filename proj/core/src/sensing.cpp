#include "mapx/sensing.hpp"

#include "mapx/errors.hpp"

namespace mapx {

std::string_view feature_name(Feature f) {
  switch (f) {
    case Feature::Opening: return "opening";
    case Feature::FlatWall: return "flat_wall";
    case Feature::ConvexCorner: return "convex_corner";
    case Feature::ConcaveCorner: return "concave_corner";
  }
  return "?";
}

std::optional<Feature> parse_feature(std::string_view name) {
  for (int i = 0; i < kFeatureCount; ++i) {
    if (feature_name(static_cast<Feature>(i)) == name) return static_cast<Feature>(i);
  }
  return std::nullopt;
}

Direction Wedge::direction() const {
  switch (index) {
    case 0: return Direction::North;
    case 2: return Direction::West;
    case 4: return Direction::South;
    default: return Direction::East;
  }
}

std::pair<Direction, Direction> Wedge::flanks() const {
  return {Wedge{(index + 7) % 8}.direction(), Wedge{(index + 1) % 8}.direction()};
}

Wedge wedge_toward(Direction d) {
  switch (d) {
    case Direction::North: return Wedge{0};
    case Direction::West: return Wedge{2};
    case Direction::South: return Wedge{4};
    case Direction::East: return Wedge{6};
  }
  return Wedge{0};
}

namespace {

std::array<FeatureTable, 16> build_geometry_table() {
  std::array<FeatureTable, 16> table{};
  for (unsigned mask = 0; mask < 16; ++mask) {
    const auto dirs = static_cast<DirectionSet>(mask);
    FeatureTable t;
    for (int w = 0; w < kWedgeCount; ++w) {
      const Wedge wedge{w};
      Feature f = Feature::FlatWall;
      if (wedge.cardinal()) {
        f = contains(dirs, wedge.direction()) ? Feature::Opening : Feature::FlatWall;
      } else {
        const auto [a, b] = wedge.flanks();
        const int open = int{contains(dirs, a)} + int{contains(dirs, b)};
        f = open == 2 ? Feature::ConvexCorner
                      : (open == 0 ? Feature::ConcaveCorner : Feature::FlatWall);
      }
      t.set(static_cast<std::size_t>(Detector{f, wedge}.index()));
    }
    table[mask] = t;
  }
  return table;
}

}  // namespace

FeatureTable geometry_features(JunctionType j) {
  static const std::array<FeatureTable, 16> table = build_geometry_table();
  return table[j.directions & 0xF];
}

void NoiseModel::validate() const {
  auto ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!ok(false_negative) || !ok(false_positive)) {
    throw InvalidArgument("noise rates must lie in [0, 1]");
  }
}

SensorReading sense(const MapHypothesis& world, Intersection loc, Detector det,
                    const NoiseModel& noise, Rng& rng, int step) {
  if (!world.grid().contains(loc)) throw InvalidArgument("sensing location outside grid");
  const bool present = feature_present(world.junction(loc), det);
  const double p_true = present ? 1.0 - noise.false_negative : noise.false_positive;
  return SensorReading{loc, det, rng.bernoulli(p_true), step, false};
}

std::vector<SensorReading> scan(const MapHypothesis& world, Intersection loc,
                                const NoiseModel& noise, Rng& rng, int step) {
  std::vector<SensorReading> out;
  out.reserve(kDetectorCount);
  for (int i = 0; i < kDetectorCount; ++i) {
    out.push_back(sense(world, loc, Detector::from_index(i), noise, rng, step));
  }
  return out;
}

std::array<SensorReading, 2> traversal_readings(const GridSpec& grid, Intersection from,
                                                Direction dir, bool success, int step) {
  auto to = grid.neighbor(from, dir);
  if (!to) throw InvalidArgument("traversal leaves the grid");
  return {SensorReading{from, Detector{Feature::Opening, wedge_toward(dir)}, success, step, true},
          SensorReading{*to, Detector{Feature::Opening, wedge_toward(opposite(dir))}, success,
                        step, true}};
}

std::vector<JunctionType> valid_junction_types(const GridSpec& grid, Intersection p) {
  const DirectionSet allowed = grid.valid_directions(p);
  std::vector<JunctionType> out;
  for (unsigned mask = 0; mask < 16; ++mask) {
    if ((mask & ~static_cast<unsigned>(allowed)) == 0) {
      out.push_back(JunctionType{static_cast<DirectionSet>(mask)});
    }
  }
  return out;
}

std::vector<JunctionType> consistent_types(const GridSpec& grid, Intersection p,
                                           const std::vector<SensorReading>& readings) {
  std::vector<JunctionType> out;
  for (JunctionType j : valid_junction_types(grid, p)) {
    const FeatureTable t = geometry_features(j);
    bool ok = true;
    for (const auto& r : readings) {
      if (r.location != p) continue;
      if (t[static_cast<std::size_t>(r.detector.index())] != r.result) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(j);
  }
  return out;
}

}  // namespace mapx
