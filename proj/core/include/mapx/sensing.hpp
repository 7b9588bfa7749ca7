#pragma once

#include <array>
#include <bitset>
#include <optional>
#include <string_view>
#include <vector>

#include "mapx/rng.hpp"
#include "mapx/world_model.hpp"

namespace mapx {

enum class Feature : std::uint8_t { Opening = 0, FlatWall = 1, ConvexCorner = 2, ConcaveCorner = 3 };

inline constexpr int kFeatureCount = 4;
inline constexpr int kWedgeCount = 8;
inline constexpr int kDetectorCount = kFeatureCount * kWedgeCount;

std::string_view feature_name(Feature f);
std::optional<Feature> parse_feature(std::string_view name);

// Eight equi-angular wedges, counterclockwise from North. Even wedges are
// cardinal (N=0, W=2, S=4, E=6); odd wedges sit between their neighbours.
struct Wedge {
  int index = 0;

  bool cardinal() const { return index % 2 == 0; }
  Direction direction() const;  // cardinal wedges only
  std::pair<Direction, Direction> flanks() const;  // diagonal wedges only

  friend bool operator==(Wedge, Wedge) = default;
};

Wedge wedge_toward(Direction d);

// Detector d_{f,w}. Canonical order is feature-major: index = feature*8 + wedge.
struct Detector {
  Feature feature = Feature::Opening;
  Wedge wedge;

  int index() const { return static_cast<int>(feature) * kWedgeCount + wedge.index; }
  static Detector from_index(int i) {
    return {static_cast<Feature>(i / kWedgeCount), Wedge{i % kWedgeCount}};
  }

  friend bool operator==(Detector, Detector) = default;
};

using FeatureTable = std::bitset<kDetectorCount>;

// Feature presence implied by a junction's geometry, indexed by detector.
FeatureTable geometry_features(JunctionType j);

inline bool feature_present(JunctionType j, Detector d) {
  return geometry_features(j)[static_cast<std::size_t>(d.index())];
}

struct NoiseModel {
  double false_negative = 0.10;
  double false_positive = 0.05;

  void validate() const;

  // Pr(reading result | feature presence).
  double likelihood(bool result, bool present) const {
    if (present) return result ? 1.0 - false_negative : false_negative;
    return result ? false_positive : 1.0 - false_positive;
  }
};

struct SensorReading {
  Intersection location;
  Detector detector;
  bool result = false;
  int step = 0;
  // Set for observations that cannot be wrong (the outcome of physically
  // attempting a corridor). Their likelihood is 1 or 0.
  bool certain = false;

  friend bool operator==(const SensorReading&, const SensorReading&) = default;
};

inline double reading_likelihood(const SensorReading& r, const NoiseModel& noise, bool present) {
  if (r.certain) return r.result == present ? 1.0 : 0.0;
  return noise.likelihood(r.result, present);
}

SensorReading sense(const MapHypothesis& world, Intersection loc, Detector det,
                    const NoiseModel& noise, Rng& rng, int step = 0);

// All 32 detectors in canonical order.
std::vector<SensorReading> scan(const MapHypothesis& world, Intersection loc,
                                const NoiseModel& noise, Rng& rng, int step = 0);

// The pair of certain opening readings implied by attempting the corridor
// from `from` toward `dir`.
std::array<SensorReading, 2> traversal_readings(const GridSpec& grid, Intersection from,
                                                Direction dir, bool success, int step);

// Junction types valid at p (no corridor leaving the grid), ascending by mask.
std::vector<JunctionType> valid_junction_types(const GridSpec& grid, Intersection p);

// Types at p that agree with every reading under a noiseless interpretation.
std::vector<JunctionType> consistent_types(const GridSpec& grid, Intersection p,
                                           const std::vector<SensorReading>& readings);

}  // namespace mapx
