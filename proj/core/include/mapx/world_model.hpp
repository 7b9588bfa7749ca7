#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace mapx {

// Compass directions. The numeric order is the canonical tie-break order.
enum class Direction : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

inline constexpr Direction kDirections[] = {Direction::North, Direction::East,
                                            Direction::South, Direction::West};

constexpr Direction opposite(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 2) % 4);
}

// Bit set over Direction (bit i <=> Direction(i)).
using DirectionSet = std::uint8_t;

constexpr DirectionSet bit(Direction d) {
  return static_cast<DirectionSet>(1u << static_cast<unsigned>(d));
}

constexpr bool contains(DirectionSet s, Direction d) { return (s & bit(d)) != 0; }

std::string_view direction_name(Direction d);
std::optional<Direction> parse_direction(std::string_view name);

enum class JunctionClass : std::uint8_t { None, DeadEnd, Straight, L, T, Cross };

std::string_view junction_class_name(JunctionClass c);

// Corridor configuration at one grid intersection.
struct JunctionType {
  DirectionSet directions = 0;

  JunctionClass class_label() const;
  int degree() const;

  friend bool operator==(JunctionType, JunctionType) = default;
};

struct Intersection {
  int x = 0;
  int y = 0;

  // Lexicographic by (y, x), the canonical tie-break order.
  friend constexpr auto operator<=>(const Intersection& a, const Intersection& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
  friend constexpr bool operator==(const Intersection&, const Intersection&) = default;
};

// A corridor slot between two neighbouring intersections, named by its lower
// endpoint and a canonical direction (North or East).
struct Edge {
  Intersection from;
  Direction dir = Direction::East;

  Intersection to() const;
  friend constexpr bool operator==(const Edge&, const Edge&) = default;
};

// Dimensions of the grid: nx vertical lines by ny horizontal lines. Edge ids
// are dense and ordered by (y, x, direction).
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(int nx, int ny);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int intersection_count() const { return nx_ * ny_; }
  int edge_count() const { return nx_ * (ny_ - 1) + ny_ * (nx_ - 1); }

  bool contains(Intersection p) const {
    return p.x >= 0 && p.y >= 0 && p.x < nx_ && p.y < ny_;
  }
  int index(Intersection p) const { return p.y * nx_ + p.x; }
  Intersection at(int index) const { return {index % nx_, index / nx_}; }

  std::optional<Intersection> neighbor(Intersection p, Direction d) const;

  // Directions that stay inside the grid from p.
  DirectionSet valid_directions(Intersection p) const;

  // Id of the edge leaving p in direction d, if it exists.
  std::optional<int> edge_id(Intersection p, Direction d) const;
  std::optional<int> edge_between(Intersection a, Intersection b) const;
  Edge edge(int id) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int nx_ = 1;
  int ny_ = 1;
};

// Present/absent flag per edge id. Not required to be connected.
using EdgeSet = std::vector<bool>;

// Knowledge or constraint about one edge.
enum class EdgeState : std::uint8_t { Unknown, Present, Absent };

using EdgeConstraints = std::vector<EdgeState>;

// A full, edge-consistent and LDP-connected corridor layout. Junction types
// are derived from the edge set, so edge consistency holds by construction;
// connectivity is checked on construction.
class MapHypothesis {
 public:
  MapHypothesis(GridSpec grid, EdgeSet edges);

  // Builds a map from per-intersection junction types (index order), checking
  // edge consistency and grid borders.
  static MapHypothesis from_junctions(GridSpec grid,
                                      const std::vector<JunctionType>& junctions);
  static MapHypothesis empty(GridSpec grid);

  const GridSpec& grid() const { return grid_; }
  const EdgeSet& edges() const { return edges_; }
  bool has_edge(int id) const { return edges_[static_cast<std::size_t>(id)]; }
  int present_edge_count() const;

  DirectionSet directions(Intersection p) const;
  JunctionType junction(Intersection p) const { return {directions(p)}; }
  bool is_ldp(Intersection p) const { return directions(p) != 0; }

  double density() const;

  friend bool operator==(const MapHypothesis&, const MapHypothesis&) = default;
  // Lexicographic by edge bitmask value (edge 0 is the least significant bit).
  friend bool operator<(const MapHypothesis& a, const MapHypothesis& b);

 private:
  GridSpec grid_;
  EdgeSet edges_;
};

DirectionSet directions_at(const GridSpec& grid, const EdgeSet& edges, Intersection p);

// True iff intersections with at least one present edge form one component.
bool ldps_connected(const GridSpec& grid, const EdgeSet& edges);

// Fraction of possible edges that are present.
double density(const GridSpec& grid, const EdgeSet& edges);

// Triangular density preference peaking at 0.5, floored at 0.05.
double density_weight(double density);

inline constexpr std::uint64_t kDefaultEnumerationBudget = std::uint64_t{1} << 16;

// All valid maps, ordered by edge bitmask. Throws BudgetExceeded when the
// number of candidate edge subsets exceeds the budget. Constraints, when
// given, fix edges and only the free edges are enumerated.
std::vector<MapHypothesis> enumerate_maps(const GridSpec& grid,
                                          std::uint64_t budget = kDefaultEnumerationBudget);
std::vector<MapHypothesis> enumerate_maps(const GridSpec& grid,
                                          const EdgeConstraints& constraints,
                                          std::uint64_t budget = kDefaultEnumerationBudget);

// Number of free (Unknown) edges under the constraints.
int free_edge_count(const EdgeConstraints& constraints);

// Draws one valid map. With density_pref the draw is weighted by
// density_weight(); otherwise it is uniform over valid maps (when the
// rejection sampler succeeds; see sample_map.cpp for the large-grid fallback).
MapHypothesis sample_map(const GridSpec& grid, std::uint64_t seed, bool density_pref = true);
MapHypothesis sample_map(const GridSpec& grid, std::uint64_t seed, bool density_pref,
                         const EdgeConstraints& constraints);

// Breadth-first path length in edge traversals; nullopt when unreachable.
std::optional<int> shortest_path(const GridSpec& grid, const EdgeSet& edges, Intersection a,
                                 Intersection b);
std::optional<int> shortest_path(const MapHypothesis& map, Intersection a, Intersection b);

// Node sequence of a breadth-first shortest path (neighbours expanded in
// N, E, S, W order), including both endpoints.
std::optional<std::vector<Intersection>> shortest_route(const GridSpec& grid,
                                                        const EdgeSet& edges, Intersection a,
                                                        Intersection b);

}  // namespace mapx
