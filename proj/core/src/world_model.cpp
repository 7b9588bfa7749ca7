#include "mapx/world_model.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "mapx/errors.hpp"

namespace mapx {

std::string_view direction_name(Direction d) {
  switch (d) {
    case Direction::North: return "N";
    case Direction::East: return "E";
    case Direction::South: return "S";
    case Direction::West: return "W";
  }
  return "?";
}

std::optional<Direction> parse_direction(std::string_view name) {
  for (Direction d : kDirections) {
    if (direction_name(d) == name) return d;
  }
  return std::nullopt;
}

std::string_view junction_class_name(JunctionClass c) {
  switch (c) {
    case JunctionClass::None: return "none";
    case JunctionClass::DeadEnd: return "dead_end";
    case JunctionClass::Straight: return "straight";
    case JunctionClass::L: return "L";
    case JunctionClass::T: return "T";
    case JunctionClass::Cross: return "cross";
  }
  return "?";
}

int JunctionType::degree() const { return std::popcount(static_cast<unsigned>(directions)); }

JunctionClass JunctionType::class_label() const {
  switch (degree()) {
    case 0: return JunctionClass::None;
    case 1: return JunctionClass::DeadEnd;
    case 2: {
      const bool ns = directions == (bit(Direction::North) | bit(Direction::South));
      const bool ew = directions == (bit(Direction::East) | bit(Direction::West));
      return (ns || ew) ? JunctionClass::Straight : JunctionClass::L;
    }
    case 3: return JunctionClass::T;
    default: return JunctionClass::Cross;
  }
}

Intersection Edge::to() const {
  return dir == Direction::North ? Intersection{from.x, from.y + 1}
                                 : Intersection{from.x + 1, from.y};
}

GridSpec::GridSpec(int nx, int ny) : nx_(nx), ny_(ny) {
  if (nx < 1 || ny < 1) throw InvalidArgument("grid dimensions must be at least 1x1");
  if (nx > 64 || ny > 64) throw InvalidArgument("grid dimensions above 64 are not supported");
}

std::optional<Intersection> GridSpec::neighbor(Intersection p, Direction d) const {
  Intersection q = p;
  switch (d) {
    case Direction::North: ++q.y; break;
    case Direction::East: ++q.x; break;
    case Direction::South: --q.y; break;
    case Direction::West: --q.x; break;
  }
  if (!contains(q)) return std::nullopt;
  return q;
}

DirectionSet GridSpec::valid_directions(Intersection p) const {
  DirectionSet s = 0;
  for (Direction d : kDirections) {
    if (neighbor(p, d)) s |= bit(d);
  }
  return s;
}

std::optional<int> GridSpec::edge_id(Intersection p, Direction d) const {
  if (!contains(p)) return std::nullopt;
  auto q = neighbor(p, d);
  if (!q) return std::nullopt;
  if (d == Direction::South || d == Direction::West) {
    p = *q;
    d = opposite(d);
  }
  const int base = p.y * (2 * nx_ - 1);
  if (p.y < ny_ - 1) {
    return d == Direction::North ? base + 2 * p.x : base + 2 * p.x + 1;
  }
  return base + p.x;  // top row: East edges only
}

std::optional<int> GridSpec::edge_between(Intersection a, Intersection b) const {
  for (Direction d : kDirections) {
    if (neighbor(a, d) == std::optional<Intersection>(b)) return edge_id(a, d);
  }
  return std::nullopt;
}

Edge GridSpec::edge(int id) const {
  const int row = 2 * nx_ - 1;
  const int y = id / row;
  const int r = id % row;
  if (y < ny_ - 1) {
    if (r % 2 == 0) return {{r / 2, y}, Direction::North};
    return {{r / 2, y}, Direction::East};
  }
  return {{r, y}, Direction::East};
}

DirectionSet directions_at(const GridSpec& grid, const EdgeSet& edges, Intersection p) {
  DirectionSet s = 0;
  for (Direction d : kDirections) {
    if (auto id = grid.edge_id(p, d); id && edges[static_cast<std::size_t>(*id)]) s |= bit(d);
  }
  return s;
}

bool ldps_connected(const GridSpec& grid, const EdgeSet& edges) {
  const int n = grid.intersection_count();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  int components = 0;
  std::vector<bool> ldp(static_cast<std::size_t>(n), false);
  for (int id = 0; id < grid.edge_count(); ++id) {
    if (!edges[static_cast<std::size_t>(id)]) continue;
    const Edge e = grid.edge(id);
    const int a = grid.index(e.from);
    const int b = grid.index(e.to());
    for (int v : {a, b}) {
      if (!ldp[static_cast<std::size_t>(v)]) {
        ldp[static_cast<std::size_t>(v)] = true;
        ++components;
      }
    }
    const int ra = find(a);
    const int rb = find(b);
    if (ra != rb) {
      parent[static_cast<std::size_t>(ra)] = rb;
      --components;
    }
  }
  return components <= 1;
}

double density(const GridSpec& grid, const EdgeSet& edges) {
  if (grid.edge_count() == 0) return 0.0;
  const auto present = std::count(edges.begin(), edges.end(), true);
  return static_cast<double>(present) / static_cast<double>(grid.edge_count());
}

double density_weight(double d) { return std::max(0.05, 1.0 - 2.0 * std::abs(d - 0.5)); }

MapHypothesis::MapHypothesis(GridSpec grid, EdgeSet edges)
    : grid_(grid), edges_(std::move(edges)) {
  if (static_cast<int>(edges_.size()) != grid_.edge_count()) {
    throw InvalidArgument("edge set size does not match grid");
  }
  if (!ldps_connected(grid_, edges_)) throw InvalidArgument("map LDPs are not connected");
}

MapHypothesis MapHypothesis::from_junctions(GridSpec grid,
                                            const std::vector<JunctionType>& junctions) {
  if (static_cast<int>(junctions.size()) != grid.intersection_count()) {
    throw InvalidArgument("junction count does not match grid");
  }
  EdgeSet edges(static_cast<std::size_t>(grid.edge_count()), false);
  for (int i = 0; i < grid.intersection_count(); ++i) {
    const Intersection p = grid.at(i);
    const DirectionSet dirs = junctions[static_cast<std::size_t>(i)].directions;
    if ((dirs & ~grid.valid_directions(p)) != 0) {
      throw InvalidArgument("junction points outside the grid");
    }
    for (Direction d : kDirections) {
      auto q = grid.neighbor(p, d);
      if (!q) continue;
      const bool here = contains(dirs, d);
      const bool there =
          contains(junctions[static_cast<std::size_t>(grid.index(*q))].directions, opposite(d));
      if (here != there) throw InvalidArgument("junction assignment is not edge-consistent");
      if (here) edges[static_cast<std::size_t>(*grid.edge_id(p, d))] = true;
    }
  }
  return MapHypothesis(grid, std::move(edges));
}

MapHypothesis MapHypothesis::empty(GridSpec grid) {
  return MapHypothesis(grid, EdgeSet(static_cast<std::size_t>(grid.edge_count()), false));
}

int MapHypothesis::present_edge_count() const {
  return static_cast<int>(std::count(edges_.begin(), edges_.end(), true));
}

DirectionSet MapHypothesis::directions(Intersection p) const {
  return directions_at(grid_, edges_, p);
}

double MapHypothesis::density() const { return mapx::density(grid_, edges_); }

bool operator<(const MapHypothesis& a, const MapHypothesis& b) {
  if (a.grid_.nx() != b.grid_.nx()) return a.grid_.nx() < b.grid_.nx();
  if (a.grid_.ny() != b.grid_.ny()) return a.grid_.ny() < b.grid_.ny();
  for (std::size_t i = a.edges_.size(); i-- > 0;) {
    if (a.edges_[i] != b.edges_[i]) return b.edges_[i];
  }
  return false;
}

int free_edge_count(const EdgeConstraints& constraints) {
  return static_cast<int>(std::count(constraints.begin(), constraints.end(), EdgeState::Unknown));
}

std::vector<MapHypothesis> enumerate_maps(const GridSpec& grid, std::uint64_t budget) {
  return enumerate_maps(
      grid, EdgeConstraints(static_cast<std::size_t>(grid.edge_count()), EdgeState::Unknown),
      budget);
}

std::vector<MapHypothesis> enumerate_maps(const GridSpec& grid,
                                          const EdgeConstraints& constraints,
                                          std::uint64_t budget) {
  if (static_cast<int>(constraints.size()) != grid.edge_count()) {
    throw InvalidArgument("constraint size does not match grid");
  }
  std::vector<int> free;
  EdgeSet base(constraints.size(), false);
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    if (constraints[i] == EdgeState::Unknown) free.push_back(static_cast<int>(i));
    if (constraints[i] == EdgeState::Present) base[i] = true;
  }
  if (free.size() >= 63 || (std::uint64_t{1} << free.size()) > budget) {
    throw BudgetExceeded("enumeration needs 2^" + std::to_string(free.size()) +
                         " candidates, above budget " + std::to_string(budget));
  }
  std::vector<MapHypothesis> out;
  const std::uint64_t total = std::uint64_t{1} << free.size();
  EdgeSet edges = base;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (std::size_t k = 0; k < free.size(); ++k) {
      edges[static_cast<std::size_t>(free[k])] = ((mask >> k) & 1U) != 0;
    }
    if (ldps_connected(grid, edges)) out.emplace_back(grid, edges);
  }
  return out;
}

namespace {

std::optional<std::vector<int>> bfs_parents(const GridSpec& grid, const EdgeSet& edges,
                                            Intersection a, Intersection b) {
  if (!grid.contains(a) || !grid.contains(b)) throw InvalidArgument("intersection outside grid");
  const int n = grid.intersection_count();
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::deque<int> queue;
  const int src = grid.index(a);
  const int dst = grid.index(b);
  parent[static_cast<std::size_t>(src)] = src;
  queue.push_back(src);
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    if (v == dst) return parent;
    const Intersection p = grid.at(v);
    for (Direction d : kDirections) {
      auto id = grid.edge_id(p, d);
      if (!id || !edges[static_cast<std::size_t>(*id)]) continue;
      const int w = grid.index(*grid.neighbor(p, d));
      if (parent[static_cast<std::size_t>(w)] != -1) continue;
      parent[static_cast<std::size_t>(w)] = v;
      queue.push_back(w);
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::vector<Intersection>> shortest_route(const GridSpec& grid,
                                                        const EdgeSet& edges, Intersection a,
                                                        Intersection b) {
  auto parent = bfs_parents(grid, edges, a, b);
  if (!parent) return std::nullopt;
  std::vector<Intersection> route;
  int v = grid.index(b);
  while (true) {
    route.push_back(grid.at(v));
    const int p = (*parent)[static_cast<std::size_t>(v)];
    if (p == v) break;
    v = p;
  }
  std::reverse(route.begin(), route.end());
  return route;
}

std::optional<int> shortest_path(const GridSpec& grid, const EdgeSet& edges, Intersection a,
                                 Intersection b) {
  auto route = shortest_route(grid, edges, a, b);
  if (!route) return std::nullopt;
  return static_cast<int>(route->size()) - 1;
}

std::optional<int> shortest_path(const MapHypothesis& map, Intersection a, Intersection b) {
  return shortest_path(map.grid(), map.edges(), a, b);
}

}  // namespace mapx
